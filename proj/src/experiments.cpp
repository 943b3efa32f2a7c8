#include "delaysync/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <fmt/format.h>

#include "delaysync/csv.hpp"
#include "delaysync/parallel.hpp"
#include "delaysync/random.hpp"

namespace dsync {

namespace {

std::string out_file(const CommandOptions& opts, const std::string& name, CommandReport& report) {
    ensure_directory(opts.out);
    const std::string path = (std::filesystem::path(opts.out) / name).string();
    report.files.push_back(path);
    return path;
}

std::string fmt_complex(Complex z) { return fmt::format("{}{:+}i", format_double(z.real()), z.imag()); }

void require_periodic(const ExperimentConfig& cfg, const char* what) {
    if (cfg.model.kind != "sl" || cfg.model.regime != Regime::periodic)
        throw PreconditionError(std::string(what) + " needs the Stuart-Landau periodic regime ([model] kind = sl, alpha > 0)");
}

std::vector<Complex> requested_sigmas(const ExperimentConfig& cfg, std::vector<Complex>& mus) {
    if (cfg.run.sigma) {
        mus.push_back(Complex(std::nan(""), std::nan("")));
        return {*cfg.run.sigma};
    }
    const Network net = build_network(cfg);
    const LaplacianSpectrum spec = laplacian_spectrum(net);
    require_usable_network(spec);
    std::vector<Complex> sigmas;
    for (Complex mu : spec.transverse_eigenvalues()) {
        mus.push_back(mu);
        sigmas.push_back(make_block(mu, cfg.run.kappa, cfg.run.tau).sigma);
    }
    return sigmas;
}

}  // namespace

int default_threads() {
    if (const char* env = std::getenv("DELAY_SYNC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
    }
    return 1;
}

CommandReport cmd_window(const ExperimentConfig& cfg, const CommandOptions& opts) {
    CommandReport report;
    const Network net = build_network(cfg);
    const LaplacianSpectrum spec = laplacian_spectrum(net);

    if (cfg.model.kind == "sl" && cfg.model.regime == Regime::periodic) {
        const PeriodicWindow w = sl_kappa_c_periodic(cfg.model.sl, cfg.run.tau, spec, cfg.run.tol);
        CsvWriter csv(out_file(opts, "periodic_window.csv", report), "tau,direction,kappa_c,ceiling,status,non_monotone");
        csv.cell(cfg.run.tau).cell(w.direction).cell(w.kappa_c).cell(w.ceiling).cell(to_string(w.status)).cell(w.non_monotone ? 1 : 0);
        csv.end_row();
        report.lines.push_back(fmt::format("tau = {}, synchronizing sign of kappa = {:+d}", format_double(cfg.run.tau), w.direction));
        report.lines.push_back(fmt::format("kappa_c = {} ({}, ceiling {})", format_double(w.kappa_c), to_string(w.status),
                                           format_double(w.ceiling)));
        if (w.non_monotone) report.lines.push_back("warning: stable and unstable samples interleave on the coarse scan");
        return report;
    }

    const LocalModel model = build_model(cfg);
    const SyncWindow w = critical_coupling(model, spec, cfg.run.window);
    CsvWriter csv(out_file(opts, "window.csv", report), "r0,rho_L,kappa_c,window_lo,window_hi");
    csv.cell(w.r0).cell(w.rho_L).cell(w.kappa_c).cell(0.0).cell(w.kappa_c);
    csv.end_row();
    report.lines.push_back(fmt::format("r0 = {}", format_double(w.r0)));
    report.lines.push_back(fmt::format("rho_L = {}", format_double(w.rho_L)));
    report.lines.push_back(fmt::format("kappa_c = {}, window (0, {})", format_double(w.kappa_c), format_double(w.kappa_c)));
    return report;
}

CommandReport cmd_spectrum(const ExperimentConfig& cfg, const CommandOptions& opts) {
    CommandReport report;
    const bool periodic = cfg.model.kind == "sl" && cfg.model.regime == Regime::periodic;
    std::vector<Complex> mus;
    const std::vector<Complex> sigmas = requested_sigmas(cfg, mus);

    std::optional<LocalModel> model;
    OmegaWindow window;
    if (periodic) {
        window = cfg.run.window.value_or(sl_periodic_window(cfg.model.sl));
    } else {
        model = build_model(cfg);
        window = cfg.run.window.value_or(default_omega_window(*model));
        const InstantaneousSpectrum inst = instantaneous_spectrum(*model);
        CsvWriter csv(out_file(opts, "instantaneous.csv", report), "re_lambda,im_lambda,strongly_unstable");
        for (Complex z : inst.instantaneous) {
            csv.cell(z.real()).cell(z.imag()).cell(z.real() > 0.0 ? 1 : 0);
            csv.end_row();
        }
    }

    std::vector<ExactSpectrum> spectra(sigmas.size());
    std::vector<std::vector<SpectrumBranch>> branches(sigmas.size());
    parallel_for(sigmas.size(), opts.threads, [&](std::size_t j) {
        const Complex sigma = sigmas[j];
        if (periodic) {
            spectra[j] = sl_periodic_exact_spectrum(sigma, cfg.model.sl, cfg.run.tau, window);
            if (sigma != Complex(0.0)) branches[j] = sl_periodic_branches(sigma, cfg.model.sl, cfg.run.tau, window, cfg.run.samples);
        } else {
            spectra[j] = exact_spectrum_equilibrium(*model, sigma, cfg.run.tau, window);
            if (sigma != Complex(0.0)) branches[j] = asymptotic_spectrum(*model, sigma, window, cfg.run.samples);
        }
    });

    CsvWriter index(out_file(opts, "sigmas.csv", report),
                    "index,re_mu,im_mu,re_sigma,im_sigma,strong_roots,pseudo_roots,max_re_lambda,seeds,dropped");
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
        const ExactSpectrum& s = spectra[j];
        const auto strong = std::count_if(s.roots.begin(), s.roots.end(), [](const auto& r) { return r.family == RootFamily::strong; });
        const long pseudo = static_cast<long>(s.roots.size()) - strong;
        index.cell(static_cast<long long>(j)).cell(mus[j].real()).cell(mus[j].imag()).cell(sigmas[j].real()).cell(sigmas[j].imag());
        index.cell(static_cast<long long>(strong)).cell(static_cast<long long>(pseudo)).cell(s.max_real());
        index.cell(s.seeds).cell(s.dropped);
        index.end_row();
        write_roots(out_file(opts, fmt::format("roots_{}.csv", j), report), s);
        if (!branches[j].empty()) write_branches(out_file(opts, fmt::format("branches_{}.csv", j), report), branches[j]);
        report.lines.push_back(fmt::format("sigma = {}: {} roots ({} strong), max Re lambda = {}", fmt_complex(sigmas[j]),
                                           s.roots.size(), strong, format_double(s.max_real())));
    }
    return report;
}

DecayFit fit_sync_decay(const Trajectory& traj, double t_a, double t_b, const std::string& mode) {
    std::vector<double> err = sync_error(traj);
    if (mode == "envelope") err = delay_segment_norm(traj.t, err, traj.tau);
    else if (mode != "pointwise") throw InvalidInput("fit mode must be pointwise or envelope");
    return fit_decay(traj.t, err, t_a, t_b);
}

CommandReport cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts) {
    CommandReport report;
    const Network net = build_network(cfg);
    const LocalModel model = build_model(cfg);
    const RunConfig& run = cfg.run;
    const HistorySpec history = random_history(net.n, model.q, run.history_seed);
    const double t_a = run.fit_start.value_or(2.0 * run.tau);
    const double t_b = run.fit_end.value_or(run.t_end);

    std::optional<double> kappa_c;
    if (cfg.model.kind != "sl" || cfg.model.regime == Regime::equilibrium) {
        try {
            kappa_c = critical_coupling(model, laplacian_spectrum(net)).kappa_c;
        } catch (const PreconditionError&) {
        }
    }

    const std::vector<double> kappas = run.kappas.empty() ? std::vector<double>{run.kappa} : run.kappas;
    struct Outcome {
        Trajectory traj;
        std::vector<double> error;
        std::optional<DecayFit> fit;
        std::string fit_issue;
    };
    std::vector<Outcome> outcomes(kappas.size());
    parallel_for(kappas.size(), opts.threads, [&](std::size_t i) {
        SimParams sp{kappas[i], run.tau, run.h, run.t_end, run.storage_cap};
        Outcome& o = outcomes[i];
        o.traj = simulate(net, model, sp, history);
        o.error = sync_error(o.traj);
        try {
            o.fit = fit_sync_decay(o.traj, t_a, t_b, run.fit_mode);
        } catch (const DomainError& e) {
            o.fit_issue = e.what();
        }
    });

    const bool sweep = !run.kappas.empty();
    CsvWriter fits(out_file(opts, sweep ? "transient.csv" : "fit.csv", report),
                   "kappa,t_tr_fit,t_tr_theory,eta,t_a,t_b,r_squared,low_confidence,blew_up,initial_error,final_error");
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const Outcome& o = outcomes[i];
        const double nan = std::nan("");
        double theory = nan;
        if (kappa_c && kappas[i] > 0.0 && kappas[i] < *kappa_c) theory = transient_time(kappas[i], *kappa_c, run.tau);
        fits.cell(kappas[i]).cell(o.fit ? o.fit->t_tr : nan).cell(theory).cell(o.fit ? o.fit->eta : nan);
        fits.cell(t_a).cell(t_b).cell(o.fit ? o.fit->r_squared : nan).cell(o.fit && o.fit->low_confidence ? 1 : 0);
        fits.cell(o.traj.blew_up ? 1 : 0).cell(o.error.empty() ? nan : o.error.front()).cell(o.error.empty() ? nan : o.error.back());
        fits.end_row();

        const std::string suffix = sweep ? fmt::format("_{}", i) : "";
        write_series(out_file(opts, "sync_error" + suffix + ".csv", report), "t,error", o.traj.t, o.error);
        if (!sweep) write_trajectory(out_file(opts, "trajectory.csv", report), o.traj, opts.stride);

        std::string line = fmt::format("kappa = {}: sync error {} -> {}", format_double(kappas[i]),
                                       format_double(o.error.empty() ? nan : o.error.front()),
                                       format_double(o.error.empty() ? nan : o.error.back()));
        if (o.traj.blew_up) line += fmt::format(", blew up at t = {}", format_double(o.traj.blow_up_time));
        if (o.fit)
            line += fmt::format(", fitted t_tr = {} (r^2 = {:.4f}{})", format_double(o.fit->t_tr), o.fit->r_squared,
                                o.fit->low_confidence ? ", low confidence" : "");
        else
            line += ", no fit: " + o.fit_issue;
        if (!std::isnan(theory)) line += fmt::format(", predicted {}", format_double(theory));
        report.lines.push_back(line);
    }
    return report;
}

CommandReport cmd_map(const ExperimentConfig& cfg, const CommandOptions& opts) {
    require_periodic(cfg, "map");
    CommandReport report;
    const std::vector<MapCell> cells = sl_stability_map(cfg.map, cfg.model.sl, opts.threads);
    write_map(out_file(opts, "map.csv", report), cells);
    write_map_audit(out_file(opts, "map_audit.csv", report), cells);
    const auto stable = std::count_if(cells.begin(), cells.end(), [](const MapCell& c) { return c.max_re < 0.0; });
    const auto degenerate = std::count_if(cells.begin(), cells.end(), [](const MapCell& c) { return c.degenerate; });
    report.lines.push_back(fmt::format("{} cells, {} stable, {} degenerate", cells.size(), stable, degenerate));
    return report;
}

std::uint64_t sample_seed(std::uint64_t base, int n, int sample) {
    return mix_seed(base, (static_cast<std::uint64_t>(n) << 20) + static_cast<std::uint64_t>(sample));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SweepResult scaling_sweep(const LocalModel& model, const ScalingConfig& cfg, int threads) {
    const bool er = cfg.generator == "er";
    if (!er && cfg.generator != "ba") throw InvalidInput("scaling: generator must be ba or er");
    if (cfg.sizes.empty() || cfg.seeds < 1) throw InvalidInput("scaling: need sizes and at least one seed");
    if (er && !(cfg.p0 > 0.0)) throw InvalidInput("scaling: p0 must be positive");

    SweepResult result;
    result.r0 = compute_r0(model);

    struct Item {
        std::optional<ScalingRow> row;
        std::uint64_t last_seed = 0;
    };
    const std::size_t per = static_cast<std::size_t>(cfg.seeds);
    std::vector<Item> items(cfg.sizes.size() * per);
    parallel_for(items.size(), threads, [&](std::size_t k) {
        const int n = cfg.sizes[k / per];
        const int sample = static_cast<int>(k % per);
        const std::uint64_t base = sample_seed(cfg.seed, n, sample);
        const double logn = std::log(static_cast<double>(n));
        Item& item = items[k];
        for (int attempt = 0; attempt < (er ? kMaxResamples : 1); ++attempt) {
            const std::uint64_t seed = attempt == 0 ? base : mix_seed(base, static_cast<std::uint64_t>(attempt));
            item.last_seed = seed;
            const Network net = er ? gen_er(n, std::min(cfg.p0 * logn / n, 1.0 - 1e-12), seed) : gen_ba(n, seed);
            if (er && !is_connected(net)) continue;
            const double rho = laplacian_radius(net);
            ScalingRow row;
            row.n = n;
            row.sample = sample;
            row.seed = seed;
            row.attempts = attempt + 1;
            row.g_max = max_degree(net);
            row.rho_L = rho;
            row.kappa_c = result.r0 / rho;
            row.normalized = row.kappa_c * (er ? logn : std::sqrt(static_cast<double>(n)));
            item.row = row;
            break;
        }
    });

    for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
        ScalingSummary sum;
        sum.n = cfg.sizes[s];
        std::vector<double> normalized;
        for (std::size_t k = s * per; k < (s + 1) * per; ++k) {
            if (items[k].row) {
                result.rows.push_back(*items[k].row);
                normalized.push_back(items[k].row->normalized);
            } else {
                result.skipped.push_back({sum.n, static_cast<int>(k % per), items[k].last_seed});
                ++sum.skipped;
            }
        }
        sum.samples = static_cast<int>(normalized.size());
        sum.q25 = quantile(normalized, 0.25);
        sum.median = quantile(normalized, 0.5);
        sum.q75 = quantile(normalized, 0.75);
        result.summary.push_back(sum);
    }
    return result;
}

CommandReport cmd_scaling(const ExperimentConfig& cfg, const CommandOptions& opts) {
    CommandReport report;
    const LocalModel model = build_model(cfg);
    const SweepResult sweep = scaling_sweep(model, cfg.scaling, opts.threads);

    CsvWriter rows(out_file(opts, "scaling.csv", report), "n,seed,g_max,rho_L,kappa_c,normalized");
    for (const auto& r : sweep.rows) {
        rows.cell(r.n).cell(static_cast<unsigned long long>(r.seed)).cell(r.g_max).cell(r.rho_L).cell(r.kappa_c).cell(r.normalized);
        rows.end_row();
    }
    CsvWriter summary(out_file(opts, "scaling_summary.csv", report), "n,samples,skipped,q25,median,q75");
    for (const auto& s : sweep.summary) {
        summary.cell(s.n).cell(s.samples).cell(s.skipped).cell(s.q25).cell(s.median).cell(s.q75);
        summary.end_row();
        report.lines.push_back(fmt::format("n = {}: median normalized kappa_c = {} over {} graphs{}", s.n, format_double(s.median),
                                           s.samples, s.skipped ? fmt::format(", {} skipped", s.skipped) : ""));
    }
    if (!sweep.skipped.empty()) {
        CsvWriter skipped(out_file(opts, "scaling_skipped.csv", report), "n,sample,last_seed");
        for (const auto& s : sweep.skipped) {
            skipped.cell(s.n).cell(s.sample).cell(static_cast<unsigned long long>(s.last_seed));
            skipped.end_row();
        }
        report.lines.push_back(fmt::format("{} samples stayed disconnected after {} draws and were skipped", sweep.skipped.size(),
                                           kMaxResamples));
    }
    return report;
}

}  // namespace dsync
