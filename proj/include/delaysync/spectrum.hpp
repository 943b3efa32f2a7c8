#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/graph.hpp"
#include "delaysync/numerics.hpp"

namespace dsync {

/// Nonlinear map R^q -> R^q used by the simulator.
using VectorMap = std::function<void(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out)>;

/// Local dynamics of one node around its synchronous state: the Jacobian J
/// of f, the coupling Jacobian H = Dh(0), and f, h themselves.
struct LocalModel {
    int q = 0;
    ComplexMatrix J;
    ComplexMatrix H;
    VectorMap f_rhs;
    VectorMap h_rhs;
    std::string id;
};

/// Throws InvalidInput unless J, H are q x q, |det H| > 1e-12 and h(0) = 0.
void validate(const LocalModel& model);

/// f(x) = Jx, h(x) = Hx. J and H must be real for simulation.
LocalModel make_linear_model(const Eigen::MatrixXd& J, const Eigen::MatrixXd& H, std::string id = "linear");

struct OmegaWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// |omega| <= 4 (||J|| + ||H|| cond(H)).
OmegaWindow default_omega_window(const LocalModel& model);

struct InstantaneousSpectrum {
    std::vector<Complex> instantaneous;      ///< eigenvalues of J
    std::vector<Complex> strongly_unstable;  ///< the subset with Re > 0
};

InstantaneousSpectrum instantaneous_spectrum(const LocalModel& model);

/// Roots g of det[-lambda I + J + g H] = 0, i.e. the negated eigenvalues of
/// H^{-1}(J - lambda I). Sorted by (re, im).
std::vector<Complex> g_branches_at(const LocalModel& model, Complex lambda);

/// g_l(omega) on the imaginary axis.
std::vector<Complex> g_branches(const LocalModel& model, double omega);

/// One curve gamma_l(omega) = -ln|g_l(omega)| + ln|sigma| of the asymptotic
/// continuous spectrum. Samples with |g| < 1e-14 carry gamma = +inf.
struct SpectrumBranch {
    int index = 0;
    std::vector<double> omega;
    std::vector<double> gamma;
    std::vector<Complex> g;
};

using BranchFunction = std::function<std::vector<Complex>(Complex lambda)>;

/// Samples `branches(i omega)` on a uniform grid and links values between
/// neighbouring grid points by nearest-neighbour matching.
std::vector<SpectrumBranch> track_branches(const BranchFunction& branches, Complex sigma, OmegaWindow window, int samples);

std::vector<SpectrumBranch> asymptotic_spectrum(const LocalModel& model, Complex sigma, OmegaWindow window, int samples);

struct R0Search {
    double r0 = 0.0;
    double omega_star = 0.0;  ///< where the infimum is attained
    OmegaWindow window;       ///< after any outward expansion
    int expansions = 0;
};

/// r0 = min_l inf_omega |g_l(omega)| with the window-growth safeguard.
/// Throws PreconditionError if J has an eigenvalue with Re >= 0, and
/// NumericalError if |g| is still not growing at the window edges after
/// three doublings.
R0Search search_r0(const LocalModel& model, std::optional<OmegaWindow> window = std::nullopt);
double compute_r0(const LocalModel& model, std::optional<OmegaWindow> window = std::nullopt);

/// kappa_c = r0 / rho_L. The window of stable coupling is (0, kappa_c).
struct SyncWindow {
    double r0 = 0.0;
    double rho_L = 0.0;
    double kappa_c = 0.0;
};

/// Requires a diagonalizable Laplacian with a single zero eigenvalue.
void require_usable_network(const LaplacianSpectrum& spectrum);

SyncWindow critical_coupling(const LocalModel& model, const LaplacianSpectrum& spectrum,
                             std::optional<OmegaWindow> window = std::nullopt);

/// Transverse block: the variational equation for one Laplacian eigenvalue.
struct TransverseBlock {
    Complex mu;
    Complex sigma;  ///< -kappa mu
    double tau = 0.0;
};

TransverseBlock make_block(Complex mu, double kappa, double tau);

enum class RootFamily { pseudo, strong };

const char* to_string(RootFamily family);

struct SpectralRoot {
    Complex lambda;
    double residual = 0.0;
    int iterations = 0;
    RootFamily family = RootFamily::pseudo;
    int branch = -1;  ///< asymptotic branch the root was traced from; -1 if unassigned
};

struct ExactSpectrum {
    Complex sigma;
    double tau = 0.0;
    OmegaWindow window;
    std::vector<SpectralRoot> roots;  ///< sorted by (re, im)
    int seeds = 0;
    int dropped = 0;  ///< seeds that did not converge or left the window

    /// -inf for an empty root set.
    double max_real() const;
};

/// Characteristic function H(lambda, Y) of a delay equation whose roots in
/// lambda, with Y = sigma e^{-lambda tau}, are the exponents. `evaluate`
/// returns {H, dH/dlambda, dH/dY}; `branches` returns the roots Y of
/// H(lambda, Y) = 0; `instantaneous` is the spectrum of the undelayed part.
struct DelayCharacteristic {
    std::function<std::array<Complex, 3>(Complex lambda, Complex y)> evaluate;
    BranchFunction branches;
    std::vector<Complex> instantaneous;
};

inline constexpr double kRootDedupTolerance = 1e-6;
inline constexpr double kRootAcceptResidual = 1e-8;

/// Newton search for the exponents from two seed families: points
/// gamma_l(omega)/tau + i omega on the branch curves (first pulled onto the
/// root lattice by a few fixed-point sweeps), and the instantaneous spectrum
/// together with offsets +-i pi/(2 tau). Roots are deduplicated at 1e-6 and
/// kept only if |F| <= 1e-8. A root is `strong` when Re > 0 and the delayed
/// feedback |sigma| e^{-Re lambda tau} is below 1e-6.
ExactSpectrum solve_delay_characteristic(const DelayCharacteristic& system, Complex sigma, double tau, OmegaWindow window);

DelayCharacteristic equilibrium_characteristic(const LocalModel& model);

/// Exponents of det[-lambda I + J + sigma H e^{-lambda tau}] = 0.
ExactSpectrum exact_spectrum_equilibrium(const LocalModel& model, Complex sigma, double tau,
                                         std::optional<OmegaWindow> window = std::nullopt);

enum class Verdict { stable, unstable, boundary };

const char* to_string(Verdict verdict);

struct StabilityReport {
    Verdict asymptotic = Verdict::boundary;  ///< sign of kappa_c - |kappa|
    Verdict exact = Verdict::boundary;       ///< sign of max Re lambda at this tau
    double margin = 0.0;                     ///< min_{j,l,omega} |g_l(omega)| - |kappa mu_j|
    double max_real_part = 0.0;
    SyncWindow window;
};

StabilityReport transverse_stability(const LocalModel& model, const LaplacianSpectrum& spectrum, double kappa, double tau,
                                     std::optional<OmegaWindow> window = std::nullopt);

/// t_tr = -tau / ln(kappa / kappa_c) for 0 < kappa < kappa_c.
double transient_time(double kappa, double kappa_c, double tau);

}  // namespace dsync
