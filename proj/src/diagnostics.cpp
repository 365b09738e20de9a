#include "npz/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "npz/error.hpp"
#include "npz/invariant.hpp"

namespace npz {

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + n / 2));
}

void check_aligned(std::span<const Trajectory> ensemble) {
    if (ensemble.empty()) throw PreconditionError("empty ensemble");
    for (const auto& tr : ensemble) {
        if (tr.times != ensemble.front().times) {
            throw PreconditionError("ensemble paths must share their recording times");
        }
    }
}

// Ensemble mean of g at each recorded time.
template <class Fn>
std::vector<double> ensemble_curve(std::span<const Trajectory> ensemble, Fn&& g) {
    std::vector<double> curve(ensemble.front().size(), 0.0);
    for (const auto& tr : ensemble) {
        for (std::size_t i = 0; i < curve.size(); ++i) curve[i] += g(tr, i);
    }
    for (auto& c : curve) c /= static_cast<double>(ensemble.size());
    return curve;
}

struct TailStats {
    double max = 0.0;
    double median = 0.0;
    double ratio = 0.0;  // value at t_end over value at t_end / 2
};

TailStats tail_stats(const std::vector<double>& times, const std::vector<double>& curve) {
    const double t_half = 0.5 * times.back();
    const auto first = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t_half) - times.begin());
    std::vector<double> tail(curve.begin() + static_cast<std::ptrdiff_t>(first), curve.end());
    TailStats s;
    s.max = *std::max_element(tail.begin(), tail.end());
    s.median = median(tail);
    s.ratio = curve.back() / curve[first];
    return s;
}

}  // namespace

std::string to_string(Component c) { return c == Component::Y ? "Y" : "Z"; }

SlopeEstimate log_slope(std::span<const Trajectory> ensemble, Component component, double t_lo,
                        double t_hi) {
    if (ensemble.empty()) throw PreconditionError("log_slope: empty ensemble");
    const double min_len = kMinWindowSteps * ensemble.front().config.dt;
    if (!(t_hi - t_lo >= min_len)) {
        throw WindowTooShort("log_slope: window shorter than " + std::to_string(min_len));
    }
    SlopeEstimate est;
    est.component = component;
    est.t_lo = t_lo;
    est.t_hi = t_hi;
    est.n_paths = ensemble.size();

    std::vector<double> slopes;
    slopes.reserve(ensemble.size());
    for (const auto& tr : ensemble) {
        const auto& logs = component == Component::Y ? tr.log_y : tr.log_z;
        if (logs.empty() || !std::isfinite(logs.front())) {
            throw PreconditionError("log_slope: component must start strictly positive");
        }
        if (tr.t_end() < t_hi - 1e-9 * t_hi) {
            throw PreconditionError("log_slope: window extends past the trajectory");
        }
        double n = 0, st = 0, sl = 0, stt = 0, stl = 0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double t = tr.times[i];
            if (t < t_lo || t > t_hi) continue;
            if (!std::isfinite(logs[i])) {
                throw PreconditionError("log_slope: component hit zero inside the window");
            }
            n += 1;
            st += t;
            sl += logs[i];
            stt += t * t;
            stl += t * logs[i];
        }
        if (n < 3) throw WindowTooShort("log_slope: fewer than 3 records in the window");
        slopes.push_back((n * stl - st * sl) / (n * stt - st * st));
    }

    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(slopes.size());
    double ss = 0.0;
    for (double s : slopes) ss += (s - mean) * (s - mean);
    est.slope = mean;
    est.std_error = slopes.size() > 1
                        ? std::sqrt(ss / static_cast<double>(slopes.size() - 1) /
                                    static_cast<double>(slopes.size()))
                        : 0.0;
    return est;
}

ExtinctionReport extinction_rate_check(const Model& m, Regime regime, const SimConfig& cfg,
                                       const ExtinctionCheckOptions& opts) {
    if (regime != Regime::TotalExtinction && regime != Regime::PhytoplanktonOnly) {
        throw PreconditionError("extinction_rate_check needs TotalExtinction or PhytoplanktonOnly, "
                                "got " + to_string(regime));
    }
    ExtinctionReport rep;
    rep.regime = regime;
    rep.options = opts;
    rep.lambda1 = lambda1(m.params, m.f1).value;

    const double t_lo = opts.t_lo.value_or(0.2 * cfg.t_end);
    const double t_hi = opts.t_hi.value_or(cfg.t_end);
    const auto paths = simulate_ensemble(m, opts.init, cfg);
    const std::span<const Trajectory> ens(paths);

    auto check = [&](std::string name, Component c, double target) {
        SlopeCheck sc;
        sc.name = std::move(name);
        sc.target = target + opts.target_shift;
        sc.estimate = log_slope(ens, c, t_lo, t_hi);
        sc.tolerance = std::max(opts.abs_tol, opts.n_std_errors * sc.estimate.std_error);
        sc.passed = std::abs(sc.estimate.slope - sc.target) <= sc.tolerance;
        rep.checks.push_back(std::move(sc));
    };

    const auto& p = m.params;
    if (regime == Regime::TotalExtinction) {
        check("Y-slope vs lambda1", Component::Y, rep.lambda1);
        check("Z-slope vs -alpha3-sigma3^2/2", Component::Z, -p.alpha3 - 0.5 * p.sigma3 * p.sigma3);
    } else {
        const auto a = m.f1.constant_value();
        const auto b = m.f2.constant_value();
        rep.lambda2 = (a && b) ? lambda2_closed_form_constant(p, *a, *b)
                               : lambda2_estimate(m, cfg).estimate.mean;
        check("Z-slope vs lambda2", Component::Z, *rep.lambda2);
    }
    rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                             [](const SlopeCheck& c) { return c.passed; });
    return rep;
}

MomentReport moment_curve(std::span<const Trajectory> ensemble, double q,
                          const CurveThresholds& th) {
    check_aligned(ensemble);
    if (!(q > 0.0)) throw PreconditionError("moment exponent must be positive");
    MomentReport rep;
    rep.q = q;
    rep.thresholds = th;
    rep.times = ensemble.front().times;
    rep.curve = ensemble_curve(ensemble, [q](const Trajectory& tr, std::size_t i) {
        const auto& s = tr.states[i];
        return std::pow(1.0 + s.x + s.y + s.z, q);
    });
    const auto ts = tail_stats(rep.times, rep.curve);
    rep.plateau_ratio = ts.ratio;
    rep.tail_max = ts.max;
    rep.tail_median = ts.median;
    rep.passed = std::isfinite(ts.ratio) && ts.ratio >= th.plateau_lo &&
                 ts.ratio <= th.plateau_hi && ts.max <= th.tail_factor * ts.median;
    return rep;
}

MomentReport moment_bound_check(std::span<const Trajectory> ensemble, double q, double q0,
                                const CurveThresholds& th) {
    if (q > q0) {
        throw PreconditionError("moment exponent q=" + std::to_string(q) + " exceeds q0=" +
                                std::to_string(q0));
    }
    return moment_curve(ensemble, q, th);
}

NegativeMomentReport negative_moment_check(const ModelParams& p, const FunctionalResponse& f1,
                                           double theta, const SimConfig& cfg, double x0,
                                           double y0, double tail_factor) {
    if (!(theta >= 0.0)) throw PreconditionError("theta must be nonnegative");
    if (!(y0 > 0.0)) throw PreconditionError("negative moments need y0 > 0");
    NegativeMomentReport rep;
    rep.theta = theta;
    rep.tail_factor = tail_factor;
    rep.lambda1 = lambda1(p, f1).value;

    const auto paths = simulate_boundary2d_ensemble(p, f1, x0, y0, cfg);
    const std::span<const Trajectory> ens(paths);
    rep.times = paths.front().times;
    rep.curve = ensemble_curve(ens, [theta](const Trajectory& tr, std::size_t i) {
        return std::exp(-theta * tr.log_y[i]);
    });
    const auto ts = tail_stats(rep.times, rep.curve);
    rep.tail_max = ts.max;
    rep.tail_median = ts.median;
    rep.passed = std::isfinite(ts.max) && ts.max <= tail_factor * ts.median;
    return rep;
}

ConvergenceReport convergence_check(const Model& m, const State& init_a, const State& init_b,
                                    const SimConfig& cfg, const ConvergenceOptions& opts) {
    if (opts.dims < 1 || opts.dims > 3) throw PreconditionError("dims must be 1, 2 or 3");
    if (opts.n_windows < 1) throw PreconditionError("n_windows must be >= 1");
    if (opts.check_regime) {
        ThresholdOptions topts;
        topts.monte_carlo_for_constant = false;
        const auto rep = evaluate_thresholds(m, cfg, topts);
        if (opts.dims == 3 && rep.regime != Regime::Coexistence) {
            throw PreconditionError("3D convergence check needs Coexistence, got " +
                                    to_string(rep.regime));
        }
        if (opts.dims < 3 && !(rep.lambda1.value > rep.tol)) {
            throw PreconditionError("marginal convergence check needs lambda1 > 0");
        }
    }

    ConvergenceReport out;
    out.options = opts;
    out.seed_a = cfg.seed;
    out.seed_b = opts.seed_b.value_or(cfg.seed + 1);
    SimConfig cfg_b = cfg;
    cfg_b.seed = out.seed_b;

    std::vector<Trajectory> all = simulate_ensemble(m, init_a, cfg);
    const std::size_t n_a = all.size();
    {
        auto b = simulate_ensemble(m, init_b, cfg_b);
        all.insert(all.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    }
    const std::span<const Trajectory> ens_all(all);
    const auto ens_a = ens_all.subspan(0, n_a);
    const auto ens_b = ens_all.subspan(n_a);

    const double t0 = cfg.burn_in;
    const double t1 = all.front().t_end();
    const LogGrid grid = make_log_grid(ens_all, opts.dims, opts.n_bins, t0, t1);
    for (std::size_t k = 1; k <= opts.n_windows; ++k) {
        const double end =
            k == opts.n_windows ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / opts.n_windows;
        const auto ha = occupation_histogram(ens_a, grid, t0, end);
        const auto hb = occupation_histogram(ens_b, grid, t0, end);
        out.window_ends.push_back(end);
        out.tv.push_back(tv_distance(ha, hb));
    }
    out.final_tv = out.tv.back();

    std::array<std::size_t, 3> above{};
    std::size_t total = 0;
    for (const auto& tr : all) {
        for (std::size_t i = 0; i < tr.size(); ++i) {
            if (tr.times[i] < t0) continue;
            ++total;
            const auto& s = tr.states[i];
            above[0] += s.x > opts.floor;
            above[1] += s.y > opts.floor;
            above[2] += s.z > opts.floor;
        }
    }
    for (int c = 0; c < 3; ++c) {
        out.fraction_above_floor[c] = static_cast<double>(above[c]) / static_cast<double>(total);
    }
    out.passed = out.final_tv <= opts.tv_threshold;
    return out;
}

}  // namespace npz
