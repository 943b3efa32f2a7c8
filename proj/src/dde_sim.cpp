#include "delaysync/dde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "delaysync/random.hpp"

namespace dsync {

long delay_steps(double tau, double h) {
    if (!(tau > 0.0) || !(h > 0.0) || !std::isfinite(tau) || !std::isfinite(h))
        throw InvalidInput("delay grid: tau and h must be positive and finite");
    const double ratio = tau / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw InvalidInput("delay grid: h = " + std::to_string(h) + " does not divide tau = " + std::to_string(tau));
    return static_cast<long>(n);
}

DdeRun integrate_dde(const DdeRhs& rhs, int dim, double tau, double h, double t_end, const HistoryFunction& history,
                     const StepObserver& observer) {
    if (dim < 1) throw InvalidInput("integrator: dimension must be positive");
    if (!history) throw InvalidInput("integrator: missing history");
    const long N = delay_steps(tau, h);
    const double raw = t_end / h;
    const long total = static_cast<long>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));

    // Ring buffers of the last N + 1 states and their derivatives.
    const long slots = N + 1;
    Eigen::MatrixXd xs(dim, slots), fs(dim, slots);
    Eigen::VectorXd x(dim), d0(dim), dm(dim), d1(dim), tmp(dim), k1(dim), k2(dim), k3(dim), k4(dim);
    history(0.0, x);

    DdeRun run;
    if (!x.allFinite() || x.norm() > kBlowUpNorm) {
        run.blew_up = true;
        return run;
    }
    xs.col(0) = x;
    if (observer && !observer(0, 0.0, x)) return run;

    for (long i = 0; i < total; ++i) {
        const double t = static_cast<double>(i) * h;
        const long past = i - N;
        if (past + 1 <= 0) {
            history(t - tau, d0);
            history(t - tau + 0.5 * h, dm);
            history(t - tau + h, d1);
        } else {
            const long a = past % slots, b = (past + 1) % slots;
            d0 = xs.col(a);
            d1 = xs.col(b);
            dm = 0.5 * (d0 + d1) + (h / 8.0) * (fs.col(a) - fs.col(b));
        }
        rhs(t, x, d0, k1);
        fs.col(i % slots) = k1;
        tmp = x + 0.5 * h * k1;
        rhs(t + 0.5 * h, tmp, dm, k2);
        tmp = x + 0.5 * h * k2;
        rhs(t + 0.5 * h, tmp, dm, k3);
        tmp = x + h * k3;
        rhs(t + h, tmp, d1, k4);
        tmp = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double t_next = static_cast<double>(i + 1) * h;
        if (!tmp.allFinite() || tmp.norm() > kBlowUpNorm) {
            run.blew_up = true;
            run.blow_up_time = t_next;
            return run;
        }
        x = tmp;
        xs.col((i + 1) % slots) = x;
        run.steps = i + 1;
        if (observer && !observer(i + 1, t_next, x)) break;
    }
    return run;
}

HistorySpec constant_history(std::vector<Eigen::VectorXd> per_node) {
    HistorySpec spec;
    spec.constant = std::move(per_node);
    return spec;
}

HistorySpec random_history(int n, int q, std::uint64_t seed) {
    if (n < 1 || q < 1) throw InvalidInput("history: n and q must be positive");
    Rng rng(seed);
    HistorySpec spec;
    spec.seed = seed;
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd v(q);
        for (int c = 0; c < q; ++c) v(c) = 2.0 * uniform01(rng) - 1.0;
        spec.constant.push_back(v);
    }
    return spec;
}

Trajectory simulate(const Network& net, const LocalModel& model, const SimParams& params, const HistorySpec& history) {
    validate(net);
    validate(model);
    if (!model.f_rhs || !model.h_rhs) throw InvalidInput("simulate: model has no vector field");
    const long N = delay_steps(params.tau, params.h);
    if (N < 64) throw InvalidInput("simulate: need h <= tau / 64, got tau / h = " + std::to_string(N));
    if (!(params.t_end >= params.tau)) throw InvalidInput("simulate: t_end must be at least tau");
    if (!std::isfinite(params.kappa)) throw InvalidInput("simulate: kappa must be finite");
    if (params.storage_cap < 1) throw InvalidInput("simulate: storage cap must be positive");

    const int n = net.n, q = model.q;
    const Eigen::Index dim = static_cast<Eigen::Index>(n) * q;

    HistoryFunction hist = history.function;
    if (!hist) {
        if (static_cast<int>(history.constant.size()) != n) throw InvalidInput("simulate: need one history vector per node");
        Eigen::VectorXd flat(dim);
        for (int j = 0; j < n; ++j) {
            if (history.constant[j].size() != q || !history.constant[j].allFinite())
                throw InvalidInput("simulate: history vectors must be finite with q entries");
            flat.segment(static_cast<Eigen::Index>(j) * q, q) = history.constant[j];
        }
        hist = [flat](double, Eigen::Ref<Eigen::VectorXd> out) { out = flat; };
    }

    std::vector<std::vector<int>> sources(n);
    for (const Edge& e : net.edges) sources[e.target].push_back(e.source);

    const double kappa = params.kappa;
    Eigen::VectorXd diff(q), coupled(q);
    DdeRhs rhs = [&](double, const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xd,
                     Eigen::Ref<Eigen::VectorXd> dx) {
        for (int j = 0; j < n; ++j) {
            const Eigen::Index at = static_cast<Eigen::Index>(j) * q;
            model.f_rhs(x.segment(at, q), dx.segment(at, q));
            if (kappa == 0.0) continue;
            for (int l : sources[j]) {
                diff = xd.segment(static_cast<Eigen::Index>(l) * q, q) - xd.segment(at, q);
                model.h_rhs(diff, coupled);
                dx.segment(at, q) += kappa * coupled;
            }
        }
    };

    const double raw = params.t_end / params.h;
    const long total = static_cast<long>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    const auto points = static_cast<std::size_t>(total + 1);
    const auto per_point = static_cast<std::size_t>(dim);
    const long stride = static_cast<long>(std::max<std::size_t>(1, (points * per_point + params.storage_cap - 1) / params.storage_cap));

    Trajectory traj;
    traj.n = n;
    traj.q = q;
    traj.h = params.h;
    traj.stride = stride;
    traj.kappa = kappa;
    traj.tau = params.tau;
    traj.seed = history.seed;
    traj.model_id = model.id;
    const long kept = total / stride + 1;
    traj.states.resize(kept, dim);
    traj.t.reserve(kept);

    long row = 0;
    const DdeRun run = integrate_dde(rhs, static_cast<int>(dim), params.tau, params.h, params.t_end, hist,
                                     [&](long step, double t, const Eigen::VectorXd& x) {
                                         if (step % stride == 0) {
                                             traj.states.row(row++) = x.transpose();
                                             traj.t.push_back(t);
                                         }
                                         return true;
                                     });
    traj.states.conservativeResize(row, dim);
    traj.blew_up = run.blew_up;
    traj.blow_up_time = run.blow_up_time;
    return traj;
}

std::vector<double> sync_error(const Trajectory& traj) {
    std::vector<double> out(traj.samples(), 0.0);
    for (Eigen::Index k = 0; k < traj.samples(); ++k) {
        const auto row = traj.states.row(k);
        const auto first = row.segment(0, traj.q);
        double worst = 0.0;
        for (int j = 1; j < traj.n; ++j)
            worst = std::max(worst, (row.segment(static_cast<Eigen::Index>(j) * traj.q, traj.q) - first).norm());
        out[k] = worst;
    }
    return out;
}

std::vector<double> delay_segment_norm(const std::vector<double>& t, const std::vector<double>& values, double width) {
    if (t.size() != values.size()) throw InvalidInput("segment norm: time and value arrays differ in length");
    if (!(width >= 0.0)) throw InvalidInput("segment norm: width must be nonnegative");
    std::vector<double> out(values.size());
    std::deque<std::size_t> window;  // indices with decreasing values
    for (std::size_t k = 0; k < values.size(); ++k) {
        while (!window.empty() && values[window.back()] <= values[k]) window.pop_back();
        window.push_back(k);
        while (t[window.front()] <= t[k] - width && window.front() != k) window.pop_front();
        out[k] = values[window.front()];
    }
    return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values, double t_a, double t_b) {
    if (t.size() != values.size()) throw InvalidInput("decay fit: time and value arrays differ in length");
    if (!(t_a < t_b)) throw InvalidInput("decay fit: empty window");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_a || t[k] > t_b) continue;
        if (!(values[k] > 0.0)) throw DomainError("decay fit: nonpositive value " + std::to_string(values[k]) + " at t = " + std::to_string(t[k]));
        const double x = t[k], y = std::log(values[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    if (m < 20) throw DomainError("decay fit: only " + std::to_string(m) + " samples in the window, need 20");
    const double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
    DecayFit fit;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.samples = m;
    const double slope = cxy / cxx;
    fit.eta = -slope;
    fit.t_tr = 1.0 / fit.eta;
    fit.r_squared = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
    fit.low_confidence = fit.r_squared < 0.9;
    return fit;
}

double delay_test_exact(double t) {
    if (t <= 0.0) return 1.0;
    // Piece k is a polynomial in s = t - k on [0, 1]:
    // p_k(s) = p_{k-1}(1) - int_0^s p_{k-1}, with p_{-1} = 1.
    std::vector<double> p{1.0};
    double end_value = 1.0;
    const int k = static_cast<int>(std::ceil(t)) - 1;
    for (int piece = 0; piece <= k; ++piece) {
        std::vector<double> next(p.size() + 1, 0.0);
        next[0] = end_value;
        for (std::size_t i = 0; i < p.size(); ++i) next[i + 1] = -p[i] / static_cast<double>(i + 1);
        p = std::move(next);
        end_value = 0.0;
        for (double c : p) end_value += c;
    }
    const double s = t - k;
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
    return v;
}

OrderReport convergence_order() {
    // Past t = 4 the pieces are polynomials of degree > 4, which RK4 does not
    // reproduce exactly.
    constexpr double kOrderTime = 8.0;
    const DdeRhs rhs = [](double, const Eigen::Ref<const Eigen::VectorXd>&, const Eigen::Ref<const Eigen::VectorXd>& xd,
                          Eigen::Ref<Eigen::VectorXd> dx) { dx = -xd; };
    const HistoryFunction one = [](double, Eigen::Ref<Eigen::VectorXd> out) { out.setOnes(); };
    const double exact = delay_test_exact(kOrderTime);

    OrderReport report;
    for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
        double last = 0.0;
        integrate_dde(rhs, 1, 1.0, h, kOrderTime, one, [&](long, double, const Eigen::VectorXd& x) {
            last = x(0);
            return true;
        });
        report.steps.push_back(h);
        report.errors.push_back(std::abs(last - exact));
    }
    report.order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < report.errors.size(); ++i)
        report.order = std::min(report.order, std::log2(report.errors[i - 1] / report.errors[i]));
    return report;
}

}  // namespace dsync
