#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delaysync/config.hpp"
#include "delaysync/dde_sim.hpp"

namespace dsync {

struct CommandOptions {
    std::string out = "out";
    int threads = 1;
    long stride = 1;
};

/// DELAY_SYNC_THREADS if set to a positive integer, else 1.
int default_threads();

/// Human-readable summary lines and the files written.
struct CommandReport {
    std::vector<std::string> lines;
    std::vector<std::string> files;
};

CommandReport cmd_window(const ExperimentConfig& cfg, const CommandOptions& opts);
CommandReport cmd_spectrum(const ExperimentConfig& cfg, const CommandOptions& opts);
CommandReport cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts);
CommandReport cmd_map(const ExperimentConfig& cfg, const CommandOptions& opts);
CommandReport cmd_scaling(const ExperimentConfig& cfg, const CommandOptions& opts);

/// Fit of the sync error of `traj` on [t_a, t_b]; "envelope" fits the
/// running sup over the trailing delay interval instead of the raw error.
DecayFit fit_sync_decay(const Trajectory& traj, double t_a, double t_b, const std::string& mode);

struct ScalingRow {
    int n = 0;
    int sample = 0;
    std::uint64_t seed = 0;  ///< seed of the accepted graph
    int attempts = 1;
    int g_max = 0;
    double rho_L = 0.0;
    double kappa_c = 0.0;
    double normalized = 0.0;  ///< kappa_c sqrt(n) for BA, kappa_c ln(n) for ER
};

struct ScalingSkip {
    int n = 0;
    int sample = 0;
    std::uint64_t last_seed = 0;
};

struct ScalingSummary {
    int n = 0;
    int samples = 0;
    int skipped = 0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct SweepResult {
    double r0 = 0.0;
    std::vector<ScalingRow> rows;  ///< ordered by (n, sample)
    std::vector<ScalingSkip> skipped;
    std::vector<ScalingSummary> summary;
};

inline constexpr int kMaxResamples = 20;

/// Sample seed for (n, sample) derived from the base seed; ER attempt a > 0
/// uses mix_seed(sample_seed, a).
std::uint64_t sample_seed(std::uint64_t base, int n, int sample);

SweepResult scaling_sweep(const LocalModel& model, const ScalingConfig& cfg, int threads = 1);

/// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double q);

}  // namespace dsync
