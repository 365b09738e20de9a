#include "npz/thresholds.hpp"

#include <cmath>
#include <map>
#include <set>

#include "npz/error.hpp"

namespace npz {

namespace {

double* param_field(ModelParams& p, const std::string& name) {
    static const std::map<std::string, double ModelParams::*> fields = {
        {"lambda_input", &ModelParams::lambda_input},
        {"alpha1", &ModelParams::alpha1},
        {"alpha2", &ModelParams::alpha2},
        {"alpha3", &ModelParams::alpha3},
        {"alpha4", &ModelParams::alpha4},
        {"alpha5", &ModelParams::alpha5},
        {"sigma1", &ModelParams::sigma1},
        {"sigma2", &ModelParams::sigma2},
        {"sigma3", &ModelParams::sigma3},
    };
    const auto it = fields.find(name);
    return it == fields.end() ? nullptr : &(p.*(it->second));
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::TotalExtinction: return "TotalExtinction";
        case Regime::PhytoplanktonOnly: return "PhytoplanktonOnly";
        case Regime::Coexistence: return "Coexistence";
        case Regime::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

Regime regime_from_string(const std::string& s) {
    for (Regime r : {Regime::TotalExtinction, Regime::PhytoplanktonOnly, Regime::Coexistence,
                     Regime::Inconclusive}) {
        if (to_string(r) == s) return r;
    }
    throw PreconditionError("unknown regime '" + s + "'");
}

std::string to_string(Lambda1Method m) {
    return m == Lambda1Method::ClosedForm ? "closed_form" : "quadrature";
}

double ell_theta(const ModelParams& p, const FunctionalResponse& f1, double theta,
                 double quad_tol) {
    const auto law = invgamma_from_params(p, theta);
    return quadrature_against_invgamma(law, [&](double u) { return f1(u, 0.0) * u; }, quad_tol)
        .value;
}

Lambda1Result lambda1(const ModelParams& p, const FunctionalResponse& f1, double quad_tol) {
    Lambda1Result r;
    const double correction = p.alpha2 + 0.5 * p.sigma2 * p.sigma2;
    r.quadrature_value = ell_theta(p, f1, 0.0, quad_tol) - correction;
    r.value = r.quadrature_value;
    if (const auto a = f1.constant_value()) {
        const double closed = *a * p.lambda_input / p.alpha1 - correction;
        r.closed_form_value = closed;
        r.value = closed;
        r.method = Lambda1Method::ClosedForm;
        if (std::abs(closed - r.quadrature_value) > kLambda1Agreement) {
            throw ToleranceNotMet("lambda1 closed form and quadrature disagree");
        }
    }
    return r;
}

BoundaryMoments boundary_moments_constant(const ModelParams& p, double a) {
    const double l1 = a * p.lambda_input / p.alpha1 - p.alpha2 - 0.5 * p.sigma2 * p.sigma2;
    if (!(l1 > 0.0) || !(a > 0.0)) {
        throw NotApplicable("boundary stationary law exists only when lambda1 > 0");
    }
    BoundaryMoments m;
    m.mean_x = (p.alpha2 + 0.5 * p.sigma2 * p.sigma2) / a;
    m.mean_y = (p.lambda_input - p.alpha1 * m.mean_x) / (p.alpha2 - p.alpha4);
    return m;
}

double lambda2_closed_form_constant(const ModelParams& p, double a, double b) {
    const auto m = boundary_moments_constant(p, a);
    return b * m.mean_y - p.alpha3 - 0.5 * p.sigma3 * p.sigma3;
}

Lambda2Estimate lambda2_estimate(const Model& m, const SimConfig& cfg, double x0, double y0,
                                 double tol) {
    const double l1 = lambda1(m.params, m.f1).value;
    if (!(l1 > tol)) {
        throw PreconditionError("lambda2 is defined only when lambda1 > tol (lambda1=" +
                                std::to_string(l1) + ")");
    }
    if (!(y0 > 0.0)) throw PreconditionError("lambda2_estimate needs y0 > 0");
    const auto paths = simulate_boundary2d_ensemble(m.params, m.f1, x0, y0, cfg);
    const auto& f2 = m.f2;
    auto est = ergodic_average(std::span<const Trajectory>(paths),
                               [&f2](const State& s) { return f2(s.y, 0.0) * s.y; }, cfg.burn_in);
    est.mean -= m.params.alpha3 + 0.5 * m.params.sigma3 * m.params.sigma3;
    return {est, est.lo() < 0.0 && est.hi() > 0.0};
}

Regime classify(double lambda1, std::optional<double> lambda2, double tol) {
    return classify(lambda1, lambda2, tol, tol);
}

Regime classify(double lambda1, std::optional<double> lambda2, double tol1, double tol2) {
    if (!(tol1 > 0.0) || !(tol2 > 0.0)) throw PreconditionError("classify: tol must be positive");
    if (lambda1 < -tol1) return Regime::TotalExtinction;
    if (!(lambda1 > tol1) || !lambda2) return Regime::Inconclusive;
    if (*lambda2 < -tol2) return Regime::PhytoplanktonOnly;
    if (*lambda2 > tol2) return Regime::Coexistence;
    return Regime::Inconclusive;
}

ThresholdReport evaluate_thresholds(const Model& m, const SimConfig& cfg,
                                    const ThresholdOptions& opts) {
    const auto validation = validate_params(m);
    if (!validation.passed()) {
        std::string names;
        for (const auto& v : validation.violations()) names += (names.empty() ? "" : ", ") + v;
        throw PreconditionError("model assumptions violated: " + names);
    }
    ThresholdReport rep;
    rep.params = m.params;
    rep.tol = opts.tol;
    rep.lambda1 = lambda1(m.params, m.f1);
    if (!(rep.lambda1.value > opts.tol)) {
        rep.regime = classify(rep.lambda1.value, std::nullopt, opts.tol);
        return rep;
    }

    const auto a = m.f1.constant_value();
    const auto b = m.f2.constant_value();
    if (a && b) rep.lambda2_closed_form = lambda2_closed_form_constant(m.params, *a, *b);
    if (!rep.lambda2_closed_form || opts.monte_carlo_for_constant) {
        rep.lambda2_mc = lambda2_estimate(m, cfg, opts.x0, opts.y0, opts.tol).estimate;
    }

    double band = opts.tol;
    if (rep.lambda2_closed_form) {
        rep.lambda2 = rep.lambda2_closed_form;
        rep.lambda2_method = "closed_form";
    } else {
        rep.lambda2 = rep.lambda2_mc->mean;
        rep.lambda2_method = "monte_carlo";
        band = std::max(opts.tol, rep.lambda2_mc->half_width);
    }
    rep.regime = classify(rep.lambda1.value, rep.lambda2, opts.tol, band);
    return rep;
}

Model with_parameter(const Model& base, const std::string& name, double value) {
    Model m = base;
    if (double* f = param_field(m.params, name)) {
        *f = value;
        return m;
    }
    if (name.size() > 3 && (name.rfind("f1.", 0) == 0 || name.rfind("f2.", 0) == 0)) {
        auto& f = name[1] == '1' ? m.f1 : m.f2;
        f = f.with_parameter(name.substr(3), value);
        return m;
    }
    throw PreconditionError("unknown parameter '" + name + "'");
}

double get_parameter(const Model& m, const std::string& name) {
    ModelParams p = m.params;
    if (const double* f = param_field(p, name)) return *f;
    if (name.size() > 3 && (name.rfind("f1.", 0) == 0 || name.rfind("f2.", 0) == 0)) {
        return (name[1] == '1' ? m.f1 : m.f2).parameter(name.substr(3));
    }
    throw PreconditionError("unknown parameter '" + name + "'");
}

RegimeMap regime_map(const Model& base, const Axis& axis1, const Axis& axis2, const SimConfig& cfg,
                     const ThresholdOptions& opts) {
    if (axis1.param == axis2.param) {
        throw PreconditionError("regime_map: duplicate axis parameter '" + axis1.param + "'");
    }
    if (axis1.values.empty() || axis2.values.empty()) {
        throw PreconditionError("regime_map: empty axis");
    }
    if (axis1.values.size() * axis2.values.size() > kMaxGridCells) {
        throw PreconditionError("regime_map: grid exceeds " + std::to_string(kMaxGridCells) +
                                " cells");
    }
    (void)get_parameter(base, axis1.param);
    (void)get_parameter(base, axis2.param);

    RegimeMap out{axis1, axis2, {}};
    const std::size_t n1 = axis1.values.size(), n2 = axis2.values.size();
    out.cells.resize(n1 * n2);
    ThresholdOptions cell_opts = opts;
    cell_opts.monte_carlo_for_constant = false;
    // Cells are independent; each uses cfg.seed so noise is shared across the grid.
    parallel_for(n1 * n2, [&](std::size_t idx) {
        auto& cell = out.cells[idx];
        cell.row = idx / n2;
        cell.col = idx % n2;
        cell.value1 = axis1.values[cell.row];
        cell.value2 = axis2.values[cell.col];
        const Model m =
            with_parameter(with_parameter(base, axis1.param, cell.value1), axis2.param, cell.value2);
        cell.report = evaluate_thresholds(m, cfg, cell_opts);
    });
    return out;
}

}  // namespace npz
