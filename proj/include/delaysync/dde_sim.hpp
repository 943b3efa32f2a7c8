#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/graph.hpp"
#include "delaysync/spectrum.hpp"

namespace dsync {

using HistoryFunction = std::function<void(double t, Eigen::Ref<Eigen::VectorXd> out)>;

/// dx/dt = rhs(t, x(t), x(t - tau)).
using DdeRhs = std::function<void(double t, const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& delayed, Eigen::Ref<Eigen::VectorXd> dx)>;

/// Called at t = 0 and after every accepted step; returning false stops.
using StepObserver = std::function<bool(long step, double t, const Eigen::VectorXd& x)>;

inline constexpr double kBlowUpNorm = 1e12;

struct DdeRun {
    long steps = 0;
    bool blew_up = false;
    double blow_up_time = 0.0;
};

/// tau / h as an integer, or InvalidInput if h does not divide tau.
long delay_steps(double tau, double h);

/// Fixed-step RK4 with the delay aligned to the grid. Full-step delayed
/// values are stored grid points; the half-step value comes from the cubic
/// Hermite interpolant of the two neighbouring points and their stored
/// derivatives. Delayed times in [-tau, 0] are read from `history`.
/// Stops before storing a state with norm above 1e12 or a non-finite entry.
DdeRun integrate_dde(const DdeRhs& rhs, int dim, double tau, double h, double t_end, const HistoryFunction& history,
                     const StepObserver& observer);

/// Initial data on [-tau, 0]. `function` (t -> R^{nq}) takes precedence over
/// the per-node constants when set.
struct HistorySpec {
    std::vector<Eigen::VectorXd> constant;
    HistoryFunction function;
    std::optional<std::uint64_t> seed;
};

HistorySpec constant_history(std::vector<Eigen::VectorXd> per_node);

/// Per-node constants drawn uniformly from [-1, 1]^q.
HistorySpec random_history(int n, int q, std::uint64_t seed);

struct SimParams {
    double kappa = 0.0;
    double tau = 1.0;
    double h = 1.0 / 64.0;
    double t_end = 1.0;
    std::size_t storage_cap = 20'000'000;  ///< scalars kept in memory
};

/// Uniform samples of all node states; row k holds x(t[k]) node-major.
struct Trajectory {
    int n = 0;
    int q = 0;
    double h = 0.0;
    long stride = 1;  ///< integration steps per stored sample
    double kappa = 0.0;
    double tau = 0.0;
    std::optional<std::uint64_t> seed;
    std::string model_id;
    std::vector<double> t;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> states;
    bool blew_up = false;
    double blow_up_time = 0.0;

    Eigen::Index samples() const { return states.rows(); }
};

/// x_j' = f(x_j) + kappa sum_l A_jl h(x_l(t - tau) - x_j(t - tau)).
/// Requires tau = N h for an integer N >= 64 and t_end >= tau.
Trajectory simulate(const Network& net, const LocalModel& model, const SimParams& params, const HistorySpec& history);

/// max_j ||x_1(t) - x_j(t)|| per stored sample.
std::vector<double> sync_error(const Trajectory& traj);

/// Running sup of `values` over the trailing window (t - width, t].
std::vector<double> delay_segment_norm(const std::vector<double>& t, const std::vector<double>& values, double width);

struct DecayFit {
    double eta = 0.0;
    double t_tr = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double r_squared = 0.0;
    int samples = 0;
    bool low_confidence = false;  ///< r^2 < 0.9
};

/// Least squares for ln(value) against t on [t_a, t_b]; eta = -slope.
/// Needs at least 20 samples, all strictly positive (else DomainError).
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values, double t_a, double t_b);

/// Exact solution of x' = -x(t - 1), x = 1 on [-1, 0], by the method of steps.
double delay_test_exact(double t);

struct OrderReport {
    std::vector<double> steps;
    std::vector<double> errors;  ///< |x_h(3) - x(3)|
    double order = 0.0;          ///< smallest observed order between halvings
};

/// Observed order of the integrator on the test problem at t = 8, h = 1/8, 1/16, 1/32.
OrderReport convergence_order();

}  // namespace dsync
