#include "delaysync/sl_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaysync/parallel.hpp"

namespace dsync {

namespace {

void require_orbit(const SLParams& p, const char* what) {
    validate(p);
    if (!(p.alpha > 0.0)) throw PreconditionError(std::string(what) + ": the periodic orbit needs alpha > 0");
}

void require_tau(double tau, const char* what) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput(std::string(what) + ": tau must be positive and finite");
}

}  // namespace

void validate(const SLParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta)) throw InvalidInput("Stuart-Landau: non-finite parameters");
    if (!(p.beta > 0.0)) throw InvalidInput("Stuart-Landau: beta must be positive");
    if (p.alpha == 0.0) throw InvalidInput("Stuart-Landau: alpha must be nonzero");
}

LocalModel sl_equilibrium_model(const SLParams& p) {
    validate(p);
    const double a = p.alpha, b = p.beta;
    LocalModel m;
    m.q = 2;
    m.J.resize(2, 2);
    m.J << a, -b, b, a;
    m.H = ComplexMatrix::Identity(2, 2);
    m.f_rhs = [a, b](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) {
        const double r2 = x(0) * x(0) + x(1) * x(1);
        out(0) = a * x(0) - b * x(1) - x(0) * r2;
        out(1) = b * x(0) + a * x(1) - x(1) * r2;
    };
    m.h_rhs = [](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) { out = x; };
    m.id = "stuart_landau";
    return m;
}

PeriodicSLAnalysis sl_periodic_frame(const SLParams& p, double tau) {
    require_orbit(p, "periodic frame");
    require_tau(tau, "periodic frame");
    const double c = std::cos(p.beta * tau), s = std::sin(p.beta * tau);
    PeriodicSLAnalysis a;
    a.J0 = ComplexMatrix::Zero(2, 2);
    a.J0(0, 0) = -2.0 * p.alpha;
    a.T_mat.resize(2, 2);
    a.T_mat << c, -s, s, c;
    a.d1H = 2.0 * p.alpha;
    a.d2H = -2.0 * p.alpha * c;
    a.alpha_P = -(a.d2H / a.d1H).real();
    a.degenerate = std::abs(c) < kDegenerateBand;
    return a;
}

Complex sl_char_H_at(Complex lambda, Complex g, const SLParams& p, double tau) {
    const double c = std::cos(p.beta * tau);
    return g * g - 2.0 * c * (p.alpha + lambda) * g + 2.0 * p.alpha * lambda + lambda * lambda;
}

Complex sl_char_H(double omega, Complex g, const SLParams& p, double tau) {
    return sl_char_H_at(Complex(0.0, omega), g, p, tau);
}

std::pair<Complex, Complex> sl_g_pm_at(Complex lambda, const SLParams& p, double tau) {
    const double c = std::cos(p.beta * tau);
    const Complex mid = c * (p.alpha + lambda);
    // On the imaginary axis the discriminant has positive real part, so the
    // principal root is continuous there; the sign fixes g_minus(0) = 0.
    const Complex root = std::sqrt(mid * mid - 2.0 * p.alpha * lambda - lambda * lambda);
    const double sign = c * p.alpha < 0.0 ? -1.0 : 1.0;
    return {mid + sign * root, mid - sign * root};
}

std::pair<Complex, Complex> sl_g_pm(double omega, const SLParams& p, double tau) {
    return sl_g_pm_at(Complex(0.0, omega), p, tau);
}

DelayCharacteristic sl_periodic_characteristic(const SLParams& p, double tau) {
    require_orbit(p, "periodic spectrum");
    require_tau(tau, "periodic spectrum");
    const double c = std::cos(p.beta * tau), a = p.alpha;
    DelayCharacteristic sys;
    sys.evaluate = [c, a](Complex lambda, Complex y) -> std::array<Complex, 3> {
        const Complex h = y * y - 2.0 * c * (a + lambda) * y + 2.0 * a * lambda + lambda * lambda;
        return {h, 2.0 * lambda + 2.0 * a - 2.0 * c * y, 2.0 * y - 2.0 * c * (a + lambda)};
    };
    sys.branches = [p, tau](Complex lambda) {
        const auto [plus, minus] = sl_g_pm_at(lambda, p, tau);
        return std::vector<Complex>{plus, minus};
    };
    sys.instantaneous = {Complex(-2.0 * a, 0.0), Complex(0.0, 0.0)};
    return sys;
}

OmegaWindow sl_periodic_window(const SLParams& p) {
    const double w = 4.0 * (2.0 * std::abs(p.alpha) + 1.0);
    return {-w, w};
}

std::vector<SpectrumBranch> sl_periodic_branches(Complex sigma, const SLParams& p, double tau, OmegaWindow window, int samples) {
    require_orbit(p, "periodic branches");
    require_tau(tau, "periodic branches");
    if (samples < 2) throw InvalidInput("periodic branches: need at least two samples");
    if (!(window.lo < window.hi)) throw InvalidInput("periodic branches: empty omega window");
    if (sigma == Complex(0.0)) throw InvalidInput("periodic branches: sigma must be nonzero");
    std::vector<SpectrumBranch> out(2);
    for (int l = 0; l < 2; ++l) out[l].index = l;
    for (int i = 0; i < samples; ++i) {
        const double w = (i == samples - 1) ? window.hi : window.lo + (window.hi - window.lo) * i / (samples - 1);
        const auto [plus, minus] = sl_g_pm(w, p, tau);
        for (int l = 0; l < 2; ++l) {
            const Complex g = l == 0 ? plus : minus;
            out[l].omega.push_back(w);
            out[l].g.push_back(g);
            out[l].gamma.push_back(std::abs(g) < 1e-14 ? std::numeric_limits<double>::infinity()
                                                       : -std::log(std::abs(g)) + std::log(std::abs(sigma)));
        }
    }
    return out;
}

ExactSpectrum sl_periodic_exact_spectrum(Complex sigma, const SLParams& p, double tau, std::optional<OmegaWindow> window) {
    return solve_delay_characteristic(sl_periodic_characteristic(p, tau), sigma, tau, window.value_or(sl_periodic_window(p)));
}

std::vector<MapCell> sl_stability_map(const MapGrid& grid, const SLParams& p, int threads) {
    require_orbit(p, "stability map");
    if (grid.sigma_points < 1 || grid.tau_points < 1) throw InvalidInput("stability map: grid needs at least one point per axis");
    if (grid.sigma_lo > grid.sigma_hi || grid.tau_lo > grid.tau_hi) throw InvalidInput("stability map: empty range");
    if (!(grid.tau_lo > 0.0)) throw InvalidInput("stability map: tau range must be positive");
    auto axis = [](double lo, double hi, int points, int i) {
        return points == 1 ? lo : (i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1));
    };

    const std::size_t total = static_cast<std::size_t>(grid.sigma_points) * grid.tau_points;
    std::vector<MapCell> cells(total);
    for (int t = 0; t < grid.tau_points; ++t) {
        for (int s = 0; s < grid.sigma_points; ++s) {
            MapCell& c = cells[static_cast<std::size_t>(t) * grid.sigma_points + s];
            c.tau = axis(grid.tau_lo, grid.tau_hi, grid.tau_points, t);
            c.sigma = axis(grid.sigma_lo, grid.sigma_hi, grid.sigma_points, s);
            c.degenerate = std::abs(std::cos(p.beta * c.tau)) < kDegenerateBand;
        }
    }

    parallel_for(total, threads, [&](std::size_t i) {
        MapCell& c = cells[i];
        const ExactSpectrum spec = sl_periodic_exact_spectrum(c.sigma, p, c.tau);
        c.max_re = spec.max_real();
        c.root_count = static_cast<int>(spec.roots.size());
    });
    return cells;
}

int sl_sync_direction(const SLParams& p, double tau) {
    validate(p);
    require_tau(tau, "sync direction");
    const double c = std::cos(p.beta * tau);
    if (std::abs(c) < kDegenerateBand)
        throw DomainError("sync direction undefined: tau = " + std::to_string(tau) +
                          " lies in the excluded set tau = (pi + 2 M pi) / (2 beta), |cos(beta tau)| < 1e-6");
    return c > 0.0 ? 1 : -1;
}

const char* to_string(WindowStatus status) {
    switch (status) {
        case WindowStatus::ok: return "ok";
        case WindowStatus::empty: return "empty";
        default: return "saturated";
    }
}

double sl_periodic_max_real(const SLParams& p, double tau, const LaplacianSpectrum& spectrum, double kappa) {
    const DelayCharacteristic sys = sl_periodic_characteristic(p, tau);
    const OmegaWindow window = sl_periodic_window(p);
    double worst = -std::numeric_limits<double>::infinity();
    for (Complex mu : spectrum.transverse_eigenvalues())
        worst = std::max(worst, solve_delay_characteristic(sys, -kappa * mu, tau, window).max_real());
    return worst;
}

PeriodicWindow sl_kappa_c_periodic(const SLParams& p, double tau, const LaplacianSpectrum& spectrum, double tol,
                                   std::optional<double> ceiling) {
    require_orbit(p, "periodic window");
    require_usable_network(spectrum);
    if (!(tol > 0.0)) throw InvalidInput("periodic window: tolerance must be positive");
    PeriodicWindow out;
    out.direction = sl_sync_direction(p, tau);
    out.ceiling = ceiling.value_or(1.0 / spectrum.rho_L);
    if (!(out.ceiling > 0.0)) throw InvalidInput("periodic window: bracket ceiling must be positive");

    auto stable = [&](double s) {
        ++out.evaluations;
        return sl_periodic_max_real(p, tau, spectrum, out.direction * s) < 0.0;
    };

    constexpr int scan = 16;
    std::vector<char> verdict(scan);
    for (int i = 0; i < scan; ++i) verdict[i] = stable(out.ceiling * (i + 1) / scan);
    const auto first_unstable = std::find(verdict.begin(), verdict.end(), 0);
    if (first_unstable == verdict.end()) {
        out.kappa_c = out.ceiling;
        out.status = WindowStatus::saturated;
        return out;
    }
    out.non_monotone = std::find(first_unstable, verdict.end(), 1) != verdict.end();

    const int k = static_cast<int>(first_unstable - verdict.begin());
    double hi = out.ceiling * (k + 1) / scan;
    double lo = out.ceiling * k / scan;
    if (k == 0) {
        // The window may be narrower than the scan step: halve toward 0.
        lo = 0.0;
        for (int halving = 0; halving < 30; ++halving) {
            const double s = hi / 2.0;
            if (s < tol) break;
            if (stable(s)) {
                lo = s;
                break;
            }
            hi = s;
        }
        if (lo == 0.0) {
            out.status = WindowStatus::empty;
            out.kappa_c = 0.0;
            return out;
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
    }
    out.kappa_c = 0.5 * (lo + hi);
    return out;
}

}  // namespace dsync
