#include "delaysync/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dsync {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t nearest_index(const std::vector<Complex>& values, Complex target) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (std::abs(values[i] - target) < std::abs(values[best] - target)) best = i;
    return best;
}

/// Reorders `cur` so that cur[l] continues prev[l].
std::vector<Complex> match_to(const std::vector<Complex>& prev, const std::vector<Complex>& cur) {
    const std::size_t q = cur.size();
    if (q <= 6) {
        std::vector<std::size_t> perm(q), best;
        std::iota(perm.begin(), perm.end(), 0);
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double cost = 0.0;
            for (std::size_t l = 0; l < q; ++l) cost += std::abs(prev[l] - cur[perm[l]]);
            if (cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<Complex> out(q);
        for (std::size_t l = 0; l < q; ++l) out[l] = cur[best[l]];
        return out;
    }
    std::vector<Complex> out(q);
    std::vector<char> used(q, 0);
    for (std::size_t l = 0; l < q; ++l) {
        std::size_t pick = q;
        for (std::size_t k = 0; k < q; ++k)
            if (!used[k] && (pick == q || std::abs(prev[l] - cur[k]) < std::abs(prev[l] - cur[pick]))) pick = k;
        used[pick] = 1;
        out[l] = cur[pick];
    }
    return out;
}

/// g values on the grid, columns continued by matching: result[i][l].
std::vector<std::vector<Complex>> tracked_values(const BranchFunction& branches, const std::vector<double>& omegas) {
    std::vector<std::vector<Complex>> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) {
        auto cur = branches(Complex(0.0, w));
        if (!rows.empty()) cur = match_to(rows.back(), cur);
        rows.push_back(std::move(cur));
    }
    return rows;
}

double gamma_of(Complex g, Complex sigma) {
    if (std::abs(g) < 1e-14) return std::numeric_limits<double>::infinity();
    return -std::log(std::abs(g)) + std::log(std::abs(sigma));
}
}  // namespace

void validate(const LocalModel& model) {
    if (model.q < 1) throw InvalidInput("local model: q must be >= 1");
    if (model.J.rows() != model.q || model.J.cols() != model.q || model.H.rows() != model.q || model.H.cols() != model.q)
        throw InvalidInput("local model: J and H must be q x q");
    if (!model.J.allFinite() || !model.H.allFinite()) throw InvalidInput("local model: non-finite Jacobian entries");
    if (std::abs(det_complex(model.H)) <= 1e-12) throw InvalidInput("local model: coupling Jacobian H is singular");
    if (model.h_rhs) {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.q), out(model.q);
        model.h_rhs(zero, out);
        if (out.cwiseAbs().maxCoeff() > 1e-12) throw InvalidInput("local model: coupling function must satisfy h(0) = 0");
    }
}

LocalModel make_linear_model(const Eigen::MatrixXd& J, const Eigen::MatrixXd& H, std::string id) {
    LocalModel m;
    m.q = static_cast<int>(J.rows());
    m.J = J.cast<Complex>();
    m.H = H.cast<Complex>();
    m.f_rhs = [J](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) { out.noalias() = J * x; };
    m.h_rhs = [H](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) { out.noalias() = H * x; };
    m.id = std::move(id);
    validate(m);
    return m;
}

OmegaWindow default_omega_window(const LocalModel& model) {
    const double w = 4.0 * (spectral_norm(model.J) + spectral_norm(model.H) * condition_number(model.H));
    return {-w, w};
}

InstantaneousSpectrum instantaneous_spectrum(const LocalModel& model) {
    InstantaneousSpectrum out;
    out.instantaneous = eig_complex(model.J);
    std::sort(out.instantaneous.begin(), out.instantaneous.end(), complex_less);
    for (Complex z : out.instantaneous)
        if (z.real() > 0.0) out.strongly_unstable.push_back(z);
    return out;
}

std::vector<Complex> g_branches_at(const LocalModel& model, Complex lambda) {
    const ComplexMatrix shifted = model.J - lambda * ComplexMatrix::Identity(model.q, model.q);
    const ComplexMatrix m = model.H.partialPivLu().solve(shifted);
    auto g = eig_complex(m);
    for (auto& v : g) v = -v;
    std::sort(g.begin(), g.end(), complex_less);
    return g;
}

std::vector<Complex> g_branches(const LocalModel& model, double omega) { return g_branches_at(model, Complex(0.0, omega)); }

std::vector<SpectrumBranch> track_branches(const BranchFunction& branches, Complex sigma, OmegaWindow window, int samples) {
    if (samples < 2) throw InvalidInput("asymptotic spectrum: need at least two samples");
    if (!(window.lo < window.hi)) throw InvalidInput("asymptotic spectrum: empty omega window");
    if (sigma == Complex(0.0)) throw InvalidInput("asymptotic spectrum: sigma must be nonzero");

    std::vector<double> omegas(samples);
    for (int i = 0; i < samples; ++i)
        omegas[i] = (i == samples - 1) ? window.hi : window.lo + (window.hi - window.lo) * i / (samples - 1);
    const auto rows = tracked_values(branches, omegas);

    const std::size_t q = rows.front().size();
    std::vector<SpectrumBranch> out(q);
    for (std::size_t l = 0; l < q; ++l) {
        out[l].index = static_cast<int>(l);
        out[l].omega = omegas;
        out[l].gamma.reserve(samples);
        out[l].g.reserve(samples);
        for (const auto& row : rows) {
            out[l].g.push_back(row[l]);
            out[l].gamma.push_back(gamma_of(row[l], sigma));
        }
    }
    return out;
}

std::vector<SpectrumBranch> asymptotic_spectrum(const LocalModel& model, Complex sigma, OmegaWindow window, int samples) {
    validate(model);
    return track_branches([&model](Complex lambda) { return g_branches_at(model, lambda); }, sigma, window, samples);
}

R0Search search_r0(const LocalModel& model, std::optional<OmegaWindow> window) {
    validate(model);
    for (Complex z : eig_complex(model.J)) {
        if (z.real() >= 0.0)
            throw PreconditionError("r0 undefined: J has eigenvalue " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                                    std::to_string(z.imag()) + "i with Re >= 0 (strongly unstable spectrum is not empty)");
    }
    auto modulus = [&model](double w) {
        const auto g = g_branches(model, w);
        double m = std::abs(g.front());
        for (Complex v : g) m = std::min(m, std::abs(v));
        return m;
    };
    // |g| must increase outward over the last 5% of each end.
    auto grows_outward = [&](OmegaWindow w) {
        constexpr int probes = 16;
        const double edge = 0.05 * (w.hi - w.lo);
        double prev_hi = modulus(w.hi - edge), prev_lo = modulus(w.lo + edge);
        for (int i = 1; i <= probes; ++i) {
            const double t = edge * (1.0 - static_cast<double>(i) / probes);
            const double cur_hi = modulus(w.hi - t), cur_lo = modulus(w.lo + t);
            if (cur_hi < prev_hi || cur_lo < prev_lo) return false;
            prev_hi = cur_hi;
            prev_lo = cur_lo;
        }
        return true;
    };

    R0Search out;
    out.window = window.value_or(default_omega_window(model));
    while (!grows_outward(out.window)) {
        if (out.expansions == 3)
            throw NumericalError("r0 search: |g(omega)| still not growing at the window edges after 3 doublings");
        const double mid = 0.5 * (out.window.lo + out.window.hi), half = out.window.hi - mid;
        out.window = {mid - 2.0 * half, mid + 2.0 * half};
        ++out.expansions;
    }
    const Minimum m = minimize_1d(modulus, out.window.lo, out.window.hi, 1e-10);
    if (!(m.value > 0.0)) throw NumericalError("r0 search: infimum of |g| is not positive");
    out.r0 = m.value;
    out.omega_star = m.argmin;
    return out;
}

double compute_r0(const LocalModel& model, std::optional<OmegaWindow> window) { return search_r0(model, window).r0; }

void require_usable_network(const LaplacianSpectrum& spectrum) {
    if (!spectrum.diagonalizable)
        throw NumericalError("Laplacian is not diagonalizable (eigenvector condition number " +
                             std::to_string(spectrum.eigenvector_condition) + ")");
    if (spectrum.zero_count() != 1)
        throw PreconditionError("network is not connected: Laplacian has " + std::to_string(spectrum.zero_count()) +
                                " zero eigenvalues");
}

SyncWindow critical_coupling(const LocalModel& model, const LaplacianSpectrum& spectrum, std::optional<OmegaWindow> window) {
    require_usable_network(spectrum);
    SyncWindow out;
    out.r0 = compute_r0(model, window);
    out.rho_L = spectrum.rho_L;
    out.kappa_c = out.r0 / out.rho_L;
    return out;
}

TransverseBlock make_block(Complex mu, double kappa, double tau) {
    if (!(tau > 0.0)) throw InvalidInput("transverse block: tau must be positive");
    return {mu, -kappa * mu, tau};
}

const char* to_string(RootFamily family) { return family == RootFamily::strong ? "strong" : "pseudo"; }

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        default: return "boundary";
    }
}

double ExactSpectrum::max_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) m = std::max(m, r.lambda.real());
    return m;
}

ExactSpectrum solve_delay_characteristic(const DelayCharacteristic& system, Complex sigma, double tau, OmegaWindow window) {
    if (!(tau > 0.0)) throw InvalidInput("exact spectrum: tau must be positive");
    if (!(window.lo < window.hi)) throw InvalidInput("exact spectrum: empty omega window");

    ExactSpectrum out;
    out.sigma = sigma;
    out.tau = tau;
    out.window = window;

    auto feedback = [&](Complex lambda) { return sigma * std::exp(-lambda * tau); };
    auto F = [&](Complex lambda) { return system.evaluate(lambda, feedback(lambda))[0]; };
    auto dF = [&](Complex lambda) {
        const Complex y = feedback(lambda);
        const auto v = system.evaluate(lambda, y);
        return v[1] - tau * y * v[2];
    };

    if (sigma == Complex(0.0)) {
        // The delay term vanishes: the exponents are the undelayed spectrum.
        for (Complex z : system.instantaneous) {
            SpectralRoot r;
            r.lambda = z;
            r.residual = std::abs(system.evaluate(z, Complex(0.0))[0]);
            r.family = z.real() > 0.0 ? RootFamily::strong : RootFamily::pseudo;
            out.roots.push_back(r);
        }
        std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) { return complex_less(a.lambda, b.lambda); });
        out.seeds = static_cast<int>(out.roots.size());
        return out;
    }

    const double spacing = 2.0 * kPi / tau;
    std::vector<SpectralRoot> found;

    auto attempt = [&](Complex seed, int branch, std::optional<Complex> seed_g) {
        ++out.seeds;
        const RootResult r = newton_complex(F, dF, seed, kRootTolerance, 100);
        if (!r.converged || r.residual > kRootAcceptResidual || r.root.imag() < window.lo - spacing ||
            r.root.imag() > window.hi + spacing) {
            ++out.dropped;
            return;
        }
        SpectralRoot root;
        root.lambda = r.root;
        root.residual = r.residual;
        root.iterations = r.iterations;
        if (branch >= 0 && seed_g) {
            const auto gs = system.branches(r.root);
            if (nearest_index(gs, feedback(r.root)) == nearest_index(gs, *seed_g)) root.branch = branch;
        }
        found.push_back(root);
    };

    // Family (a): seeds on the branch curves, one every pi/tau in omega.
    const double step = kPi / tau;
    std::vector<double> omegas;
    for (long m = static_cast<long>(std::ceil(window.lo / step)); m * step <= window.hi; ++m) omegas.push_back(m * step);
    if (!omegas.empty()) {
        const auto rows = tracked_values(system.branches, omegas);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            for (std::size_t l = 0; l < rows[i].size(); ++l) {
                Complex g = rows[i][l];
                if (std::abs(g) < 1e-14) continue;
                Complex lambda((std::log(std::abs(sigma)) - std::log(std::abs(g))) / tau, omegas[i]);
                // Pull the seed onto the lattice point lambda tau = Log(sigma/g) + 2 pi i k.
                const double k = std::round((omegas[i] * tau - std::arg(sigma) + std::arg(g)) / (2.0 * kPi));
                for (int it = 0; it < 50; ++it) {
                    const auto gs = system.branches(lambda);
                    const Complex gc = gs[nearest_index(gs, g)];
                    if (!is_finite(gc) || std::abs(gc) < 1e-300) break;
                    const Complex next = (std::log(sigma) - std::log(gc) + Complex(0.0, 2.0 * kPi * k)) / tau;
                    if (!is_finite(next)) break;
                    const bool settled = std::abs(next - lambda) <= 1e-13 * (1.0 + std::abs(lambda));
                    lambda = next;
                    g = gc;
                    if (settled) break;
                }
                attempt(lambda, static_cast<int>(l), g);
            }
        }
    }

    // Family (b): the undelayed spectrum, plus off-axis copies so that real
    // data does not pin Newton to the real line.
    const Complex offset(0.0, kPi / (2.0 * tau));
    for (Complex z : system.instantaneous)
        for (Complex s : {z, z + offset, z - offset}) attempt(s, -1, std::nullopt);

    // Canonical order first, so the kept representatives do not depend on
    // the order the seeds were processed in.
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.lambda != b.lambda) return complex_less(a.lambda, b.lambda);
        return a.residual < b.residual;
    });
    for (const auto& r : found) {
        SpectralRoot* twin = nullptr;
        for (auto it = out.roots.rbegin(); it != out.roots.rend() && it->lambda.real() >= r.lambda.real() - kRootDedupTolerance; ++it) {
            if (std::abs(it->lambda - r.lambda) <= kRootDedupTolerance) {
                twin = &*it;
                break;
            }
        }
        if (!twin) {
            out.roots.push_back(r);
            continue;
        }
        if (twin->branch < 0) twin->branch = r.branch;
        if (r.residual < twin->residual) {
            twin->lambda = r.lambda;
            twin->residual = r.residual;
            twin->iterations = r.iterations;
        }
    }
    for (auto& r : out.roots) {
        const bool strong = r.lambda.real() > 0.0 && std::abs(sigma) * std::exp(-r.lambda.real() * tau) < 1e-6;
        r.family = strong ? RootFamily::strong : RootFamily::pseudo;
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) { return complex_less(a.lambda, b.lambda); });
    return out;
}

DelayCharacteristic equilibrium_characteristic(const LocalModel& model) {
    validate(model);
    DelayCharacteristic c;
    const int q = model.q;
    const ComplexMatrix J = model.J, H = model.H;
    c.evaluate = [J, H, q](Complex lambda, Complex y) -> std::array<Complex, 3> {
        const ComplexMatrix I = ComplexMatrix::Identity(q, q);
        const ComplexMatrix m = -lambda * I + J + y * H;
        return {det_complex(m), det_derivative(m, -I), det_derivative(m, H)};
    };
    c.branches = [model](Complex lambda) { return g_branches_at(model, lambda); };
    c.instantaneous = eig_complex(model.J);
    return c;
}

ExactSpectrum exact_spectrum_equilibrium(const LocalModel& model, Complex sigma, double tau, std::optional<OmegaWindow> window) {
    return solve_delay_characteristic(equilibrium_characteristic(model), sigma, tau, window.value_or(default_omega_window(model)));
}

StabilityReport transverse_stability(const LocalModel& model, const LaplacianSpectrum& spectrum, double kappa, double tau,
                                     std::optional<OmegaWindow> window) {
    if (kappa == 0.0) throw InvalidInput("transverse stability: kappa must be nonzero");
    if (!(tau > 0.0)) throw InvalidInput("transverse stability: tau must be positive");
    StabilityReport out;
    out.window = critical_coupling(model, spectrum, window);
    out.margin = out.window.r0 - std::abs(kappa) * out.window.rho_L;
    const double tol = 1e-12 * std::max(1.0, out.window.r0);
    out.asymptotic = std::abs(out.margin) <= tol ? Verdict::boundary : (out.margin > 0.0 ? Verdict::stable : Verdict::unstable);

    const auto characteristic = equilibrium_characteristic(model);
    const OmegaWindow w = window.value_or(default_omega_window(model));
    out.max_real_part = -std::numeric_limits<double>::infinity();
    for (Complex mu : spectrum.transverse_eigenvalues()) {
        const TransverseBlock block = make_block(mu, kappa, tau);
        out.max_real_part = std::max(out.max_real_part, solve_delay_characteristic(characteristic, block.sigma, tau, w).max_real());
    }
    out.exact = std::abs(out.max_real_part) <= 1e-12 ? Verdict::boundary
                                                      : (out.max_real_part < 0.0 ? Verdict::stable : Verdict::unstable);
    return out;
}

double transient_time(double kappa, double kappa_c, double tau) {
    if (!(tau > 0.0)) throw DomainError("transient time: tau must be positive");
    if (!(kappa > 0.0)) throw DomainError("transient time: kappa must be positive");
    if (!(kappa < kappa_c)) throw DomainError("transient time: no decay for kappa >= kappa_c");
    return -tau / std::log(kappa / kappa_c);
}

}  // namespace dsync
