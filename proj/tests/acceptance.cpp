// Acceptance suite. `acceptance <id>` runs one criterion (1-7), prints a
// single PASS/FAIL line plus detail lines, and exits 0 only on PASS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "delaysync/experiments.hpp"
#include "delaysync/random.hpp"

using namespace dsync;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, std::string what) {
        pass = pass && ok;
        details.push_back((ok ? "  ok    " : "  FAIL  ") + what);
    }
    void note(std::string what) { details.push_back("  info  " + what); }
};

LocalModel sl(double alpha) { return sl_equilibrium_model({alpha, kPi}); }

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome critical_coupling_ring() {
    Outcome o;
    const LaplacianSpectrum spec = laplacian_spectrum(gen_directed_ring(4));
    const SyncWindow w = critical_coupling(sl(-1.0), spec);
    o.check(std::abs(w.r0 - 1.0) <= 1e-6, fmt::format("r0 = {:.12g}, |alpha| = 1", w.r0));
    o.check(std::abs(w.rho_L - 2.0) <= 1e-12, fmt::format("rho_L = {:.15g}", w.rho_L));
    o.check(std::abs(w.kappa_c - 0.5) <= 1e-6, fmt::format("kappa_c = {:.12g}, target 0.5 +- 1e-6", w.kappa_c));
    return o;
}

Outcome dichotomy_by_simulation() {
    Outcome o;
    const Network net = gen_directed_ring(4);
    const LocalModel model = sl(-1.0);
    const double tau = 100.0;
    const HistorySpec history = random_history(4, 2, 3);
    for (double kappa : {0.49, 0.51}) {
        const Trajectory traj = simulate(net, model, {kappa, tau, tau / 1024.0, 2000.0}, history);
        const std::vector<double> err = sync_error(traj);
        const std::vector<double> env = delay_segment_norm(traj.t, err, tau);
        const double initial = err.front(), final_env = env.back(), final_point = err.back();
        o.note(fmt::format("kappa = {}: error(0) = {:.4g}, error(2000) = {:.4g}, sup over [1900, 2000] = {:.4g}{}", kappa,
                           initial, final_point, final_env, traj.blew_up ? ", blew up" : ""));
        if (kappa < 0.5)
            o.check(final_env < 1e-6, fmt::format("kappa = 0.49 decays below 1e-6 by t = 2000 (sup over the last delay interval {:.4g})",
                                                  final_env));
        else
            o.check(final_env >= initial,
                    fmt::format("kappa = 0.51 keeps error >= its initial value (sup over the last delay interval {:.4g} vs {:.4g})",
                                final_env, initial));
    }
    o.note(fmt::format("predicted transient time at 0.49: {:.4g}", transient_time(0.49, 0.5, tau)));
    return o;
}

// Index of the nearest value in `g` to `target`.
int nearest(const std::vector<Complex>& g, Complex target) {
    int best = 0;
    for (int l = 1; l < static_cast<int>(g.size()); ++l)
        if (std::abs(g[l] - target) < std::abs(g[best] - target)) best = l;
    return best;
}

struct ChainStats {
    int pseudo = 0;
    double worst_spacing = 0.0;  ///< max relative deviation of consecutive Im gaps from 2 pi / tau
    double deviation = 0.0;      ///< max |Re lambda tau - gamma(Im lambda)|
};

ChainStats chain_stats(const LocalModel& model, const ExactSpectrum& s) {
    // Tracked curves give each branch a stable label along omega.
    constexpr int samples = 40001;
    const auto tracked = asymptotic_spectrum(model, s.sigma, s.window, samples);
    ChainStats c;
    std::map<int, std::vector<Complex>> chains;
    for (const SpectralRoot& r : s.roots) {
        if (r.family != RootFamily::pseudo) continue;
        ++c.pseudo;
        const double w = r.lambda.imag();
        const auto k = static_cast<std::size_t>(
            std::lround(std::clamp((w - s.window.lo) / (s.window.hi - s.window.lo), 0.0, 1.0) * (samples - 1)));
        std::vector<Complex> at_k;
        for (const auto& b : tracked) at_k.push_back(b.g[k]);
        const int l = nearest(at_k, s.sigma * std::exp(-r.lambda * s.tau));
        chains[l].push_back(r.lambda);
        const std::vector<Complex> exact = g_branches(model, w);
        const double gamma = -std::log(std::abs(exact[nearest(exact, at_k[l])])) + std::log(std::abs(s.sigma));
        c.deviation = std::max(c.deviation, std::abs(r.lambda.real() * s.tau - gamma));
    }
    const double spacing = 2.0 * kPi / s.tau;
    for (auto& [l, chain] : chains) {
        std::sort(chain.begin(), chain.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
        for (std::size_t k = 1; k < chain.size(); ++k)
            c.worst_spacing = std::max(c.worst_spacing, std::abs(chain[k].imag() - chain[k - 1].imag() - spacing) / spacing);
    }
    return c;
}

Outcome spectrum_structure() {
    Outcome o;
    const LocalModel model = sl(1.0);
    const Complex sigma = -0.7 * 2.0;  // path on two nodes: mu = 2
    const ExactSpectrum s = exact_spectrum_equilibrium(model, sigma, 20.0);
    std::vector<Complex> strong;
    for (const SpectralRoot& r : s.roots)
        if (r.family == RootFamily::strong) strong.push_back(r.lambda);
    bool near = strong.size() == 2;
    for (Complex z : strong) near = near && std::min(std::abs(z - Complex(1, kPi)), std::abs(z - Complex(1, -kPi))) < 1e-3;
    std::string list;
    for (Complex z : strong) list += fmt::format(" {:.9f}{:+.9f}i", z.real(), z.imag());
    o.check(near, fmt::format("{} strongly unstable roots:{}", strong.size(), list));

    const ChainStats c20 = chain_stats(model, s);
    o.check(c20.pseudo >= 30, fmt::format("{} pseudo-continuous roots", c20.pseudo));
    o.check(c20.worst_spacing < 0.15, fmt::format("max relative spacing deviation {:.3g} (< 0.15)", c20.worst_spacing));

    std::vector<double> dev{c20.deviation};
    for (double tau : {40.0, 80.0}) dev.push_back(chain_stats(model, exact_spectrum_equilibrium(model, sigma, tau)).deviation);
    o.check(dev[1] < dev[0] && dev[2] < dev[1],
            fmt::format("chain deviation at tau = 20, 40, 80: {:.4g}, {:.4g}, {:.4g}", dev[0], dev[1], dev[2]));
    return o;
}

Outcome transient_law() {
    Outcome o;
    const Network net = gen_regular(RegularKind::path, 2);
    const LocalModel model = sl(-1.0);
    const double tau = 20.0;
    const HistorySpec history = random_history(2, 2, 7);
    for (double kappa : {0.10, 0.20, 0.30, 0.40, 0.45}) {
        const Trajectory traj = simulate(net, model, {kappa, tau, 0.078125, 2000.0}, history);
        const DecayFit fit = fit_sync_decay(traj, 2.0 * tau, 2000.0, "pointwise");
        const double theory = -tau / std::log(2.0 * kappa);
        const double rel = std::abs(fit.t_tr - theory) / theory;
        const double tol = kappa > 0.41 ? 0.15 : 0.10;
        o.check(rel < tol, fmt::format("kappa = {:.2f}: fitted t_tr = {:.4g}, predicted {:.4g}, deviation {:.2f}% (< {:.0f}%)", kappa,
                                       fit.t_tr, theory, 100.0 * rel, 100.0 * tol));
    }
    return o;
}

Outcome periodic_window() {
    Outcome o;
    const SLParams p{1.0, kPi};
    const LaplacianSpectrum spec = laplacian_spectrum(gen_directed_ring(4));
    const PeriodicWindow w20 = sl_kappa_c_periodic(p, 20.0, spec);
    const PeriodicWindow w40 = sl_kappa_c_periodic(p, 40.0, spec);
    o.check(w20.kappa_c >= 0.03 && w20.kappa_c <= 0.05 && w20.status == WindowStatus::ok,
            fmt::format("kappa_c(20) = {:.6g} ({}), target [0.03, 0.05]", w20.kappa_c, to_string(w20.status)));
    o.check(w40.kappa_c < w20.kappa_c, fmt::format("kappa_c(40) = {:.6g} < kappa_c(20)", w40.kappa_c));

    // Per-mode bounds: the complex ring modes 1 +- i set the network value.
    for (Complex mu : spec.transverse_eigenvalues()) {
        LaplacianSpectrum single;
        single.eigenvalues = {Complex(0.0), mu};
        single.rho_L = std::abs(mu);
        const PeriodicWindow m = sl_kappa_c_periodic(p, 20.0, single, 1e-4, 1.0 / spec.rho_L);
        o.note(fmt::format("mode mu = {:g}{:+g}i alone: kappa_c(20) = {:.6g} ({})", mu.real(), mu.imag(), m.kappa_c, to_string(m.status)));
    }

    const int d20 = sl_sync_direction(p, 2.0), d26 = sl_sync_direction(p, 2.6);
    bool degenerate = false;
    try {
        sl_sync_direction(p, 2.5);
    } catch (const DomainError&) {
        degenerate = true;
    }
    o.check(d20 == 1 && d26 == -1 && degenerate,
            fmt::format("stabilizing sign {:+d} at tau = 2.0, {:+d} at tau = 2.6, tau = 2.5 excluded: {}", d20, d26, degenerate));
    for (double tau : {2.0, 2.6}) {
        const int d = sl_sync_direction(p, tau);
        const double kappa = 0.05 * d;
        o.check(sl_periodic_max_real(p, tau, spec, kappa) < 0.0 && sl_periodic_max_real(p, tau, spec, -kappa) > 0.0,
                fmt::format("tau = {}: kappa = {:+.2f} stable, {:+.2f} unstable", tau, kappa, -kappa));
    }
    return o;
}

double median_row(const SweepResult& r, int n) {
    for (const ScalingSummary& s : r.summary)
        if (s.n == n) return s.median;
    return std::nan("");
}

Outcome scaling() {
    Outcome o;
    const LocalModel model = sl(-1.0);
    const int threads = default_threads();
    ScalingConfig cfg;
    cfg.sizes = {512, 1024, 2048, 4096};
    cfg.seeds = 20;

    cfg.generator = "ba";
    const SweepResult ba = scaling_sweep(model, cfg, threads);
    std::vector<double> m;
    for (const ScalingSummary& s : ba.summary) {
        m.push_back(s.median);
        o.note(fmt::format("BA n = {}: median kappa_c sqrt(n) = {:.5g} over {} graphs", s.n, s.median, s.samples));
    }
    const auto [bmin, bmax] = std::minmax_element(m.begin(), m.end());
    o.check(*bmax / *bmin - 1.0 < 0.35, fmt::format("BA median variation {:.1f}% (< 35%)", 100.0 * (*bmax / *bmin - 1.0)));

    cfg.generator = "er";
    cfg.p0 = 1.1;
    const SweepResult er = scaling_sweep(model, cfg, threads);
    m.clear();
    for (const ScalingSummary& s : er.summary) {
        m.push_back(s.median);
        o.note(fmt::format("ER n = {}: median kappa_c ln(n) = {:.5g} over {} graphs, {} skipped", s.n, s.median, s.samples, s.skipped));
    }
    const auto [emin, emax] = std::minmax_element(m.begin(), m.end());
    o.check(*emax / *emin <= 2.0, fmt::format("ER median ratio {:.3f} (<= 2)", *emax / *emin));

    cfg.sizes = {2048};
    cfg.p0 = 4.0;
    const SweepResult dense = scaling_sweep(model, cfg, threads);
    const double k11 = median_row(er, 2048) / std::log(2048.0), k4 = median_row(dense, 2048) / std::log(2048.0);
    o.check(k4 < k11, fmt::format("ER n = 2048 median kappa_c: {:.5g} at p0 = 1.1, {:.5g} at p0 = 4", k11, k4));
    return o;
}

Outcome properties() {
    Outcome o;
    Rng rng(7);

    int held = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = 10 + static_cast<int>(uniform_below(rng, 50));
        const std::uint64_t seed = rng();
        const Network net = i % 2 ? gen_ba(n, seed) : gen_er(n, 0.05 + 0.5 * uniform01(rng), seed);
        held += degree_bounds(laplacian_spectrum(net), n).holds ? 1 : 0;
    }
    o.check(held == 200, fmt::format("degree bounds hold on {}/200 random undirected graphs", held));

    double shift = 0.0;
    for (int i = 0; i < 20; ++i) {
        const LocalModel m = sl(-0.1 - 2.0 * uniform01(rng));
        const Complex sigma(4.0 * uniform01(rng) - 2.0, 4.0 * uniform01(rng) - 2.0);
        const auto a = asymptotic_spectrum(m, sigma, {-10.0, 10.0}, 201), b = asymptotic_spectrum(m, 1.0, {-10.0, 10.0}, 201);
        for (std::size_t l = 0; l < a.size(); ++l)
            for (std::size_t k = 0; k < a[l].gamma.size(); ++k)
                shift = std::max(shift, std::abs(a[l].gamma[k] - b[l].gamma[k] - std::log(std::abs(sigma))));
    }
    o.check(shift <= 1e-12, fmt::format("shift law: max |gamma(sigma) - gamma(1) - ln|sigma|| = {:.3g}", shift));

    double reduction = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int q = 2 + static_cast<int>(uniform_below(rng, 3));
        Eigen::MatrixXd J(q, q);
        for (int r = 0; r < q; ++r)
            for (int c = 0; c < q; ++c) J(r, c) = 2.0 * uniform01(rng) - 1.0;
        const double shiftJ = J.eigenvalues().real().maxCoeff() + 0.1 + uniform01(rng);
        J -= shiftJ * Eigen::MatrixXd::Identity(q, q);
        const double expected = J.eigenvalues().real().cwiseAbs().minCoeff();
        const double r0 = compute_r0(make_linear_model(J, Eigen::MatrixXd::Identity(q, q)));
        reduction = std::max(reduction, std::abs(r0 - expected));
    }
    o.check(reduction <= 1e-6, fmt::format("H = I reduction on 100 random stable J: max |r0 - min|Re eig J|| = {:.3g}", reduction));

    double residual = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double w = -20.0 + 40.0 * uniform01(rng);
        const double tau = 0.1 + 100.0 * uniform01(rng);
        const SLParams p{0.05 + 4.0 * uniform01(rng), 0.05 + 8.0 * uniform01(rng)};
        const auto [gp, gm] = sl_g_pm(w, p, tau);
        residual = std::max({residual, std::abs(sl_char_H(w, gp, p, tau)), std::abs(sl_char_H(w, gm, p, tau))});
    }
    o.check(residual <= 1e-9, fmt::format("periodic branch residual on 1000 draws: {:.3g}", residual));

    const OrderReport order = convergence_order();
    o.check(order.order >= 3.5, fmt::format("integrator order {:.3f} (errors {:.3g}, {:.3g}, {:.3g})", order.order, order.errors[0],
                                            order.errors[1], order.errors[2]));

    const fs::path root = fs::temp_directory_path() / "delaysync_acceptance";
    fs::remove_all(root);
    ExperimentConfig cfg;
    cfg.model.sl = {-1.0, kPi};
    cfg.network = NetworkConfig{};
    cfg.network->generator = "ba";
    cfg.network->n = 12;
    cfg.network->seed = 5;
    cfg.run.kappa = 0.05;
    cfg.run.tau = 2.0;
    cfg.run.h = 2.0 / 64.0;
    cfg.run.t_end = 20.0;
    auto run = [&](const std::string& tag, int threads) {
        CommandOptions opts;
        opts.out = (root / tag).string();
        opts.threads = threads;
        std::vector<std::string> files;
        for (auto* cmd : {&cmd_window, &cmd_spectrum, &cmd_simulate})
            for (const auto& f : cmd(cfg, opts).files) files.push_back(fs::path(f).filename().string());
        ExperimentConfig periodic;
        periodic.model.sl = {1.0, kPi};
        periodic.model.regime = Regime::periodic;
        periodic.map = {-1.0, 1.0, 9, 1.0, 3.0, 5};
        for (const auto& f : cmd_map(periodic, opts).files) files.push_back(fs::path(f).filename().string());
        return files;
    };
    const auto files = run("a", 1);
    run("b", 1);
    run("c", 2);
    int identical = 0;
    for (const auto& f : files) {
        const std::string a = slurp(root / "a" / f);
        identical += (!a.empty() && a == slurp(root / "b" / f) && a == slurp(root / "c" / f)) ? 1 : 0;
    }
    o.check(identical == static_cast<int>(files.size()),
            fmt::format("{}/{} output files byte-identical across reruns and thread counts", identical, files.size()));
    return o;
}

struct Criterion {
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, Criterion> criteria{
        {1, {"critical coupling of the directed 4-ring", 1.0, critical_coupling_ring}},
        {2, {"decay/growth dichotomy by simulation at tau = 100", 60.0, dichotomy_by_simulation}},
        {3, {"spectrum structure: strong roots and pseudo-continuous chain", 30.0, spectrum_structure}},
        {4, {"transient-time law on two nodes", 120.0, transient_law}},
        {5, {"periodic Stuart-Landau window", 120.0, periodic_window}},
        {6, {"scaling of kappa_c on BA and ER graphs", 600.0, scaling}},
        {7, {"property suites", 300.0, properties}},
    };
    const int id = argc > 1 ? std::atoi(argv[1]) : 0;
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
        std::fprintf(stderr, "usage: acceptance <1-7>\n");
        return 2;
    }
    const Criterion& c = it->second;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(elapsed < c.budget_s, fmt::format("runtime {:.2f} s (budget {:.0f} s)", elapsed, c.budget_s));
    fmt::print("criterion {}: {} ({})\n", id, o.pass ? "PASS" : "FAIL", c.title);
    for (const auto& d : o.details) fmt::print("{}\n", d);
    return o.pass ? 0 : 1;
}
