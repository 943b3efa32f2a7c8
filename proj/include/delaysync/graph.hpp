#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/numerics.hpp"

namespace dsync {

/// A link from `source` to `target`: node `target` receives the delayed
/// signal of node `source`, i.e. A(target, source) = 1.
struct Edge {
    int source = 0;
    int target = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unweighted simple graph. Undirected networks store both orientations of
/// every link. Edges are kept sorted.
struct Network {
    int n = 0;
    std::vector<Edge> edges;
    bool directed = false;
    std::optional<std::uint64_t> seed;  ///< set for random generators only
};

enum class RegularKind { complete, undirected_ring, star, path };

RegularKind parse_regular_kind(const std::string& name);

/// Throws InvalidInput unless n >= 2, indices in range, no self-loops, no
/// duplicates, and (undirected) the edge set is symmetric.
void validate(const Network& net);

Network gen_regular(RegularKind kind, int n);
Network gen_directed_ring(int n);

/// G(n, p): each unordered pair joined independently with probability p.
Network gen_er(int n, double p, std::uint64_t seed);

/// Preferential attachment tree: start from one edge on two nodes, each new
/// node attaches to one existing node chosen with probability proportional
/// to its degree.
Network gen_ba(int n, std::uint64_t seed);

/// In-degree of every node (the degree for undirected graphs).
std::vector<int> in_degrees(const Network& net);
int max_degree(const Network& net);

Eigen::MatrixXd adjacency_matrix(const Network& net);

/// L = D_in - A. Entries are small integers, so row sums are exactly zero.
Eigen::MatrixXd laplacian_matrix(const Network& net);

/// Spanning traversal; directed graphs use weak connectivity.
bool is_connected(const Network& net);

struct LaplacianSpectrum {
    std::vector<Complex> eigenvalues;  ///< ascending modulus, ties by (re, im)
    double rho_L = 0.0;
    int g_max = 0;
    bool diagonalizable = true;
    bool symmetric = true;
    bool vectors_checked = false;       ///< eigenpair residuals were verified
    double max_residual = 0.0;          ///< max ||Lv - mu v|| over unit v
    double eigenvector_condition = 1.0; ///< cond(V); 1 for symmetric L

    /// Magnitude below which an eigenvalue counts as zero.
    double zero_tolerance() const { return 1e-9 * std::max(1.0, rho_L); }
    int zero_count() const;
    /// Distinct nonzero eigenvalues (merged within zero_tolerance()).
    std::vector<Complex> transverse_eigenvalues() const;
};

enum class SpectrumDetail {
    full,             ///< eigenpairs, residuals and (directed) conditioning
    eigenvalues_only  ///< symmetric fast path for large sweeps
};

/// Dense eigen-decomposition of L: symmetric solver for undirected graphs,
/// general real solver for directed ones. A directed L whose eigenvector
/// matrix has condition number >= 1e8 is flagged non-diagonalizable.
/// Throws NumericalError if an eigenpair residual exceeds 1e-8 max(1, rho_L).
LaplacianSpectrum laplacian_spectrum(const Network& net, SpectrumDetail detail = SpectrumDetail::full);

/// rho_L alone. Undirected graphs use Lanczos with full reorthogonalization on
/// the sparse Laplacian, stopping once the Ritz residual is below 1e-12 rho_L;
/// otherwise (directed, or no convergence in 400 steps) the dense solver.
double laplacian_radius(const Network& net);

/// (n/(n-1)) g_max <= rho_L <= 2 g_max for undirected graphs.
struct DegreeBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool holds = false;
};
DegreeBounds degree_bounds(const LaplacianSpectrum& spectrum, int n);

/// Edge-list text: header `n <count> directed <0|1>`, then `src dst` per line.
void write_edge_list(std::ostream& os, const Network& net);
Network read_edge_list(std::istream& is);
void save_edge_list(const std::string& path, const Network& net);
Network load_edge_list(const std::string& path);

}  // namespace dsync
