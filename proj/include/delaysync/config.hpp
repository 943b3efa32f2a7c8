#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "delaysync/dde_sim.hpp"
#include "delaysync/graph.hpp"
#include "delaysync/sl_model.hpp"
#include "delaysync/spectrum.hpp"

namespace dsync {

enum class Regime { equilibrium, periodic };

struct ModelConfig {
    std::string kind = "sl";  ///< sl | matrices
    SLParams sl;
    std::string j_path;
    std::string h_path;
    Regime regime = Regime::equilibrium;
};

struct NetworkConfig {
    std::string generator;  ///< empty when edge_list is used
    std::string edge_list;
    int n = 0;
    double p = 0.0;         ///< ER edge probability; 0 means p0 ln n / n
    double p0 = 1.1;
    std::uint64_t seed = 1;
};

struct RunConfig {
    double kappa = 0.0;
    double tau = 1.0;
    double h = 0.0;  ///< 0 means tau / 256
    double t_end = 0.0;
    std::optional<OmegaWindow> window;
    int samples = 2001;
    std::optional<Complex> sigma;
    std::vector<double> kappas;
    std::optional<double> fit_start;
    std::optional<double> fit_end;
    std::string fit_mode = "pointwise";  ///< pointwise | envelope
    std::uint64_t history_seed = 1;
    double tol = 1e-4;
    std::size_t storage_cap = 20'000'000;
};

struct ScalingConfig {
    std::string generator = "ba";  ///< ba | er
    std::vector<int> sizes{512, 1024, 2048, 4096};
    int seeds = 20;
    std::uint64_t seed = 1;
    double p0 = 1.1;
};

struct ExperimentConfig {
    ModelConfig model;
    std::optional<NetworkConfig> network;
    RunConfig run;
    MapGrid map;
    ScalingConfig scaling;
    std::string base_dir;  ///< relative paths resolve against this
};

/// Reals, "pi", or "<real>*pi".
double parse_number(const std::string& text);

ExperimentConfig parse_config(std::istream& is, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Whitespace-separated rows of a real matrix.
Eigen::MatrixXd load_matrix(const std::string& path);

LocalModel build_model(const ExperimentConfig& cfg);
Network build_network(const ExperimentConfig& cfg);

}  // namespace dsync
