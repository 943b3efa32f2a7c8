#include "delaysync/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "delaysync/random.hpp"

namespace dsync {

namespace {

void require_nodes(int n, int minimum, const char* what) {
    if (n < minimum) throw InvalidInput(std::string(what) + ": need n >= " + std::to_string(minimum));
}

void add_undirected(std::vector<Edge>& edges, int a, int b) {
    edges.push_back({a, b});
    edges.push_back({b, a});
}

Network finish(int n, std::vector<Edge> edges, bool directed, std::optional<std::uint64_t> seed = std::nullopt) {
    std::sort(edges.begin(), edges.end());
    Network net{n, std::move(edges), directed, seed};
    validate(net);
    return net;
}

}  // namespace

RegularKind parse_regular_kind(const std::string& name) {
    if (name == "complete") return RegularKind::complete;
    if (name == "undirected_ring" || name == "ring") return RegularKind::undirected_ring;
    if (name == "star") return RegularKind::star;
    if (name == "path") return RegularKind::path;
    throw InvalidInput("unknown regular graph kind '" + name + "'");
}

void validate(const Network& net) {
    if (net.n < 2) throw InvalidInput("network: n must be >= 2");
    for (const Edge& e : net.edges) {
        if (e.source < 0 || e.source >= net.n || e.target < 0 || e.target >= net.n)
            throw InvalidInput("network: edge index out of range");
        if (e.source == e.target) throw InvalidInput("network: self-loop at node " + std::to_string(e.source));
    }
    if (!std::is_sorted(net.edges.begin(), net.edges.end())) throw InvalidInput("network: edges must be sorted");
    if (std::adjacent_find(net.edges.begin(), net.edges.end()) != net.edges.end())
        throw InvalidInput("network: duplicate edge");
    if (!net.directed) {
        for (const Edge& e : net.edges) {
            if (!std::binary_search(net.edges.begin(), net.edges.end(), Edge{e.target, e.source}))
                throw InvalidInput("network: undirected edge set is not symmetric");
        }
    }
}

Network gen_regular(RegularKind kind, int n) {
    std::vector<Edge> edges;
    switch (kind) {
        case RegularKind::complete:
            require_nodes(n, 2, "complete");
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) add_undirected(edges, a, b);
            break;
        case RegularKind::undirected_ring:
            require_nodes(n, 3, "undirected_ring");
            for (int a = 0; a < n; ++a) add_undirected(edges, a, (a + 1) % n);
            break;
        case RegularKind::star:
            require_nodes(n, 3, "star");
            for (int a = 1; a < n; ++a) add_undirected(edges, 0, a);
            break;
        case RegularKind::path:
            require_nodes(n, 2, "path");
            for (int a = 0; a + 1 < n; ++a) add_undirected(edges, a, a + 1);
            break;
    }
    return finish(n, std::move(edges), false);
}

Network gen_directed_ring(int n) {
    require_nodes(n, 2, "directed_ring");
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) edges.push_back({a, (a + 1) % n});
    return finish(n, std::move(edges), true);
}

Network gen_er(int n, double p, std::uint64_t seed) {
    require_nodes(n, 2, "er");
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("er: probability must lie in (0, 1)");
    Rng rng(seed);
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (uniform01(rng) < p) add_undirected(edges, a, b);
    return finish(n, std::move(edges), false, seed);
}

Network gen_ba(int n, std::uint64_t seed) {
    require_nodes(n, 2, "ba");
    Rng rng(seed);
    std::vector<Edge> edges;
    // Every edge contributes both endpoints, so a uniform pick from this list
    // selects a node with probability proportional to its degree.
    std::vector<int> endpoints{0, 1};
    add_undirected(edges, 0, 1);
    for (int node = 2; node < n; ++node) {
        const int target = endpoints[uniform_below(rng, endpoints.size())];
        add_undirected(edges, node, target);
        endpoints.push_back(node);
        endpoints.push_back(target);
    }
    return finish(n, std::move(edges), false, seed);
}

std::vector<int> in_degrees(const Network& net) {
    std::vector<int> deg(net.n, 0);
    for (const Edge& e : net.edges) ++deg[e.target];
    return deg;
}

int max_degree(const Network& net) {
    const auto deg = in_degrees(net);
    return *std::max_element(deg.begin(), deg.end());
}

Eigen::MatrixXd adjacency_matrix(const Network& net) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(net.n, net.n);
    for (const Edge& e : net.edges) a(e.target, e.source) = 1.0;
    return a;
}

Eigen::MatrixXd laplacian_matrix(const Network& net) {
    Eigen::MatrixXi l = Eigen::MatrixXi::Zero(net.n, net.n);
    for (const Edge& e : net.edges) {
        l(e.target, e.source) -= 1;
        l(e.target, e.target) += 1;
    }
    return l.cast<double>();
}

bool is_connected(const Network& net) {
    std::vector<std::vector<int>> adj(net.n);
    for (const Edge& e : net.edges) {
        adj[e.source].push_back(e.target);
        adj[e.target].push_back(e.source);
    }
    std::vector<char> seen(net.n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == net.n;
}

int LaplacianSpectrum::zero_count() const {
    const double tol = zero_tolerance();
    return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [tol](Complex mu) { return std::abs(mu) <= tol; }));
}

std::vector<Complex> LaplacianSpectrum::transverse_eigenvalues() const {
    const double tol = zero_tolerance();
    std::vector<Complex> out;
    for (Complex mu : eigenvalues) {
        if (std::abs(mu) <= tol) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](Complex v) { return std::abs(v - mu) <= tol; });
        if (!seen) out.push_back(mu);
    }
    return out;
}

LaplacianSpectrum laplacian_spectrum(const Network& net, SpectrumDetail detail) {
    validate(net);
    const Eigen::MatrixXd lap = laplacian_matrix(net);
    LaplacianSpectrum out;
    out.g_max = max_degree(net);
    out.symmetric = !net.directed;

    if (!net.directed) {
        const bool vectors = detail == SpectrumDetail::full;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericalError("laplacian_spectrum: symmetric eigensolver failed");
        const Eigen::VectorXd& ev = solver.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) out.eigenvalues.emplace_back(ev(i), 0.0);
        if (vectors) {
            const Eigen::MatrixXd& v = solver.eigenvectors();
            out.max_residual = ((lap * v) - v * ev.asDiagonal()).colwise().norm().maxCoeff();
            out.vectors_checked = true;
        }
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(lap, true);
        if (solver.info() != Eigen::Success) throw NumericalError("laplacian_spectrum: nonsymmetric eigensolver failed");
        const Eigen::VectorXcd ev = solver.eigenvalues();
        const Eigen::MatrixXcd v = solver.eigenvectors();
        out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
        const Eigen::MatrixXcd lc = lap.cast<Complex>();
        out.max_residual = ((lc * v) - v * ev.asDiagonal()).colwise().norm().maxCoeff();
        out.vectors_checked = true;
        out.eigenvector_condition = condition_number(v);
        out.diagonalizable = std::isfinite(out.eigenvector_condition) && out.eigenvector_condition < 1e8;
    }

    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Complex a, Complex b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        return complex_less(a, b);
    });
    out.rho_L = std::abs(out.eigenvalues.back());

    // A defective L has meaningless eigenvectors; only certify residuals when
    // a basis exists.
    if (out.vectors_checked && out.diagonalizable && out.max_residual > 1e-8 * std::max(1.0, out.rho_L))
        throw NumericalError("laplacian_spectrum: eigenpair residual " + std::to_string(out.max_residual) + " above tolerance");
    return out;
}

double laplacian_radius(const Network& net) {
    validate(net);
    if (net.directed || net.n < 64) return laplacian_spectrum(net, SpectrumDetail::eigenvalues_only).rho_L;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * net.edges.size());
    for (const Edge& e : net.edges) {
        entries.emplace_back(e.target, e.source, -1.0);
        entries.emplace_back(e.target, e.target, 1.0);
    }
    Eigen::SparseMatrix<double> lap(net.n, net.n);
    lap.setFromTriplets(entries.begin(), entries.end());

    const int steps = std::min(net.n, 400);
    Eigen::MatrixXd basis(net.n, steps);
    Eigen::VectorXd alpha(steps), beta(steps);
    Rng rng(0x5eed);
    Eigen::VectorXd v(net.n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform01(rng) - 0.5;
    v.normalize();

    for (int j = 0; j < steps; ++j) {
        basis.col(j) = v;
        Eigen::VectorXd w = lap * v;
        alpha(j) = v.dot(w);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        beta(j) = w.norm();

        const bool exhausted = beta(j) < 1e-14 * std::max(1.0, std::abs(alpha(j)));
        if (exhausted || (j + 1) % 10 == 0) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
            t.diagonal() = alpha.head(j + 1);
            t.diagonal(1) = t.diagonal(-1) = beta.head(j);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
            const Eigen::Index top = j;  // eigenvalues ascend
            const double theta = ritz.eigenvalues()(top);
            const double residual = beta(j) * std::abs(ritz.eigenvectors()(j, top));
            if (exhausted || residual <= 1e-12 * theta) return theta;
        }
        v = w / beta(j);
    }
    return laplacian_spectrum(net, SpectrumDetail::eigenvalues_only).rho_L;
}

DegreeBounds degree_bounds(const LaplacianSpectrum& spectrum, int n) {
    DegreeBounds b;
    b.lower = static_cast<double>(n) / (n - 1) * spectrum.g_max;
    b.upper = 2.0 * spectrum.g_max;
    const double slack = 1e-9 * std::max(1.0, spectrum.rho_L);
    b.holds = spectrum.rho_L >= b.lower - slack && spectrum.rho_L <= b.upper + slack;
    return b;
}

void write_edge_list(std::ostream& os, const Network& net) {
    os << "n " << net.n << " directed " << (net.directed ? 1 : 0) << '\n';
    for (const Edge& e : net.edges) os << e.source << ' ' << e.target << '\n';
}

Network read_edge_list(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("edge list: missing header");
    std::istringstream header(line);
    std::string key_n, key_directed;
    int n = 0, directed = -1;
    if (!(header >> key_n >> n >> key_directed >> directed) || key_n != "n" || key_directed != "directed" ||
        (directed != 0 && directed != 1))
        throw InvalidInput("edge list: header must read `n <count> directed <0|1>`");

    std::vector<Edge> edges;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Edge e;
        std::string trailing;
        if (!(row >> e.source >> e.target) || (row >> trailing))
            throw InvalidInput("edge list: malformed line " + std::to_string(lineno));
        edges.push_back(e);
    }
    if (directed == 0) {
        // Accept one orientation per undirected link; store both.
        const std::size_t given = edges.size();
        for (std::size_t i = 0; i < given; ++i) edges.push_back({edges[i].target, edges[i].source});
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    } else {
        std::sort(edges.begin(), edges.end());
    }
    Network net{n, std::move(edges), directed == 1, std::nullopt};
    validate(net);
    return net;
}

void save_edge_list(const std::string& path, const Network& net) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write edge list '" + path + "'");
    write_edge_list(os, net);
}

Network load_edge_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open edge list '" + path + "'");
    return read_edge_list(is);
}

}  // namespace dsync
