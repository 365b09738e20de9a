#include "npz/cli/report.hpp"

#include <algorithm>
#include <cmath>

#include "npz/cli/config.hpp"

namespace npz::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxCurvePoints = 200;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Thinned [t, value] pairs; always keeps the last point.
json curve_json(const std::vector<double>& t, const std::vector<double>& v) {
    json out = json::array();
    const std::size_t stride = std::max<std::size_t>(1, t.size() / kMaxCurvePoints);
    for (std::size_t i = 0; i < t.size(); i += stride) {
        out.push_back({t[i], finite_or_null(v[i])});
    }
    if (!t.empty() && (t.size() - 1) % stride != 0) {
        out.push_back({t.back(), finite_or_null(v.back())});
    }
    return out;
}

json to_json(const SlopeEstimate& s) {
    return {{"component", to_string(s.component)}, {"slope", finite_or_null(s.slope)},
            {"stderr", finite_or_null(s.std_error)}, {"window", {s.t_lo, s.t_hi}},
            {"n_paths", s.n_paths}};
}

}  // namespace

json to_json(const ModelParams& p) {
    return {{"lambda_input", p.lambda_input}, {"alpha1", p.alpha1}, {"alpha2", p.alpha2},
            {"alpha3", p.alpha3},             {"alpha4", p.alpha4}, {"alpha5", p.alpha5},
            {"sigma1", p.sigma1},             {"sigma2", p.sigma2}, {"sigma3", p.sigma3}};
}

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    json errors = json::array();
    for (const auto& v : r.violations()) errors.push_back({{"AssumptionViolated", v}});
    json j{{"passed", r.passed()}, {"checks", checks}, {"errors", errors}};
    j["derived"] = r.derived ? json{{"alpha0", r.derived->alpha0}, {"q0", r.derived->q0}}
                             : json(nullptr);
    return j;
}

json to_json(const ThresholdReport& r) {
    json j;
    j["params"] = to_json(r.params);
    j["tol"] = r.tol;
    j["lambda1"] = r.lambda1.value;
    j["lambda1_method"] = to_string(r.lambda1.method);
    j["lambda1_quadrature"] = r.lambda1.quadrature_value;
    j["lambda1_closed_form"] =
        r.lambda1.closed_form_value ? json(*r.lambda1.closed_form_value) : json(nullptr);
    j["lambda2"] = r.lambda2 ? json(*r.lambda2) : json(nullptr);
    j["lambda2_method"] = r.lambda2 ? json(r.lambda2_method) : json(nullptr);
    if (r.lambda2_mc) {
        j["lambda2_mc"] = r.lambda2_mc->mean;
        j["lambda2_ci"] = {r.lambda2_mc->lo(), r.lambda2_mc->hi()};
        j["lambda2_ci_half_width"] = r.lambda2_mc->half_width;
    } else {
        j["lambda2_mc"] = nullptr;
        j["lambda2_ci"] = nullptr;
        j["lambda2_ci_half_width"] = nullptr;
    }
    if (r.lambda2_closed_form) {
        j["lambda2_closed_form"] = *r.lambda2_closed_form;
        j["lambda2_discrepancy"] =
            r.lambda2_mc ? json(r.lambda2_mc->mean - *r.lambda2_closed_form) : json(nullptr);
    }
    j["regime"] = to_string(r.regime);
    return j;
}

json to_json(const RegimeMap& m) {
    json cells = json::array();
    for (const auto& c : m.cells) {
        cells.push_back({{"row", c.row},
                         {"col", c.col},
                         {"axis1", c.value1},
                         {"axis2", c.value2},
                         {"lambda1", c.report.lambda1.value},
                         {"lambda2", c.report.lambda2 ? json(*c.report.lambda2) : json(nullptr)},
                         {"lambda2_method",
                          c.report.lambda2 ? json(c.report.lambda2_method) : json(nullptr)},
                         {"regime", to_string(c.report.regime)}});
    }
    return {{"axis1", {{"param", m.axis1.param}, {"values", m.axis1.values}}},
            {"axis2", {{"param", m.axis2.param}, {"values", m.axis2.values}}},
            {"cells", cells}};
}

json to_json(const ExtinctionReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"target", c.target},
                          {"estimate", to_json(c.estimate)},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed}});
    }
    return {{"check", "extinction"},
            {"regime", to_string(r.regime)},
            {"lambda1", r.lambda1},
            {"lambda2", r.lambda2 ? json(*r.lambda2) : json(nullptr)},
            {"thresholds",
             {{"abs_tol", r.options.abs_tol},
              {"n_std_errors", r.options.n_std_errors},
              {"target_shift", r.options.target_shift}}},
            {"checks", checks},
            {"passed", r.passed}};
}

json to_json(const MomentReport& r) {
    return {{"check", "moments"},
            {"q", r.q},
            {"plateau_ratio", finite_or_null(r.plateau_ratio)},
            {"tail_max", finite_or_null(r.tail_max)},
            {"tail_median", finite_or_null(r.tail_median)},
            {"thresholds",
             {{"plateau_lo", r.thresholds.plateau_lo},
              {"plateau_hi", r.thresholds.plateau_hi},
              {"tail_factor", r.thresholds.tail_factor}}},
            {"curve", curve_json(r.times, r.curve)},
            {"passed", r.passed}};
}

json to_json(const NegativeMomentReport& r) {
    return {{"check", "negmoment"},
            {"theta", r.theta},
            {"lambda1", r.lambda1},
            {"tail_max", finite_or_null(r.tail_max)},
            {"tail_median", finite_or_null(r.tail_median)},
            {"thresholds", {{"tail_factor", r.tail_factor}}},
            {"curve", curve_json(r.times, r.curve)},
            {"passed", r.passed}};
}

json to_json(const ConvergenceReport& r) {
    json windows = json::array();
    for (std::size_t k = 0; k < r.tv.size(); ++k) {
        windows.push_back({{"window_end", r.window_ends[k]}, {"tv", r.tv[k]}});
    }
    return {{"check", "convergence"},
            {"seed_a", r.seed_a},
            {"seed_b", r.seed_b},
            {"dims", r.options.dims},
            {"n_bins", r.options.n_bins},
            {"thresholds", {{"tv_threshold", r.options.tv_threshold}, {"floor", r.options.floor}}},
            {"windows", windows},
            {"final_tv", r.final_tv},
            {"fraction_above_floor", r.fraction_above_floor},
            {"passed", r.passed}};
}

json run_meta(const Trajectory& tr) {
    return {{"seed", tr.config.seed},
            {"path_id", tr.path_id},
            {"dt", tr.config.dt},
            {"t_end", tr.config.t_end},
            {"subsample_every", tr.config.subsample_every},
            {"scheme", to_string(tr.config.scheme)},
            {"steps", tr.steps},
            {"clamp_events", tr.clamp_events},
            {"clamp_fraction",
             tr.steps ? static_cast<double>(tr.clamp_events) / static_cast<double>(tr.steps) : 0.0},
            {"versions", {{"npz", kVersion}, {"format", kFormatVersion}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace npz::cli
