#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "delaysync/graph.hpp"
#include "delaysync/spectrum.hpp"

namespace dsync {

/// Stuart-Landau oscillator z' = (alpha + i beta) z - z |z|^2.
struct SLParams {
    double alpha = -1.0;
    double beta = 1.0;
};

void validate(const SLParams& p);

/// Real 2D form around z = 0: J = [[a, -b], [b, a]], H = I, h the identity.
LocalModel sl_equilibrium_model(const SLParams& p);

/// Rotating-frame reduction around the orbit of radius sqrt(alpha).
struct PeriodicSLAnalysis {
    ComplexMatrix J0;    ///< diag(-2 alpha, 0)
    ComplexMatrix T_mat; ///< rotation by beta tau
    double alpha_P = 0.0;
    Complex d1H;
    Complex d2H;
    bool degenerate = false;
};

inline constexpr double kDegenerateBand = 1e-6;

/// Requires alpha > 0, tau > 0.
PeriodicSLAnalysis sl_periodic_frame(const SLParams& p, double tau);

/// H(lambda, g) = g^2 - 2 cos(beta tau)(alpha + lambda) g + 2 alpha lambda + lambda^2.
Complex sl_char_H_at(Complex lambda, Complex g, const SLParams& p, double tau);

/// H(i omega, g).
Complex sl_char_H(double omega, Complex g, const SLParams& p, double tau);

/// The two roots g of H(lambda, g) = 0, labelled so that on the imaginary
/// axis g_minus(0) = 0 and g_plus(0) = 2 alpha cos(beta tau).
std::pair<Complex, Complex> sl_g_pm_at(Complex lambda, const SLParams& p, double tau);
std::pair<Complex, Complex> sl_g_pm(double omega, const SLParams& p, double tau);

/// Characteristic function of one transverse block around the orbit.
DelayCharacteristic sl_periodic_characteristic(const SLParams& p, double tau);

/// |omega| <= 4 (2|alpha| + 1): the equilibrium default applied to (J0, T).
OmegaWindow sl_periodic_window(const SLParams& p);

/// Branch curves through g_plus (index 0) and g_minus (index 1).
std::vector<SpectrumBranch> sl_periodic_branches(Complex sigma, const SLParams& p, double tau, OmegaWindow window, int samples);

ExactSpectrum sl_periodic_exact_spectrum(Complex sigma, const SLParams& p, double tau,
                                         std::optional<OmegaWindow> window = std::nullopt);

struct MapCell {
    double sigma = 0.0;
    double tau = 0.0;
    double max_re = 0.0;
    bool degenerate = false;
    int root_count = 0;
};

struct MapGrid {
    double sigma_lo = -1.0, sigma_hi = 1.0;
    int sigma_points = 41;
    double tau_lo = 1.0, tau_hi = 3.0;
    int tau_points = 41;
};

/// Cells in row-major order: tau outer, sigma inner. Each cell is solved
/// independently, so the output does not depend on `threads`.
std::vector<MapCell> sl_stability_map(const MapGrid& grid, const SLParams& p, int threads = 1);

/// +1 when cos(beta tau) > 0 (positive kappa synchronizes), -1 when < 0.
/// Throws DomainError inside the degenerate band.
int sl_sync_direction(const SLParams& p, double tau);

enum class WindowStatus { ok, empty, saturated };

const char* to_string(WindowStatus status);

struct PeriodicWindow {
    double kappa_c = 0.0;       ///< |kappa| at the sign change
    int direction = 1;          ///< sign of the synchronizing kappa
    double ceiling = 0.0;       ///< bracket ceiling, 1/rho_L by default
    WindowStatus status = WindowStatus::ok;
    bool non_monotone = false;  ///< stable and unstable samples interleave on the scan
    int evaluations = 0;
};

/// max over transverse mu_j of max Re lambda at kappa (signed).
double sl_periodic_max_real(const SLParams& p, double tau, const LaplacianSpectrum& spectrum, double kappa);

/// Bisection on |kappa| in the synchronizing direction for the edge of the
/// stable interval adjacent to 0.
PeriodicWindow sl_kappa_c_periodic(const SLParams& p, double tau, const LaplacianSpectrum& spectrum, double tol = 1e-4,
                                   std::optional<double> ceiling = std::nullopt);

}  // namespace dsync
