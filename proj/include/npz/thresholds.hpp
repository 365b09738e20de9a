#pragma once

#include <optional>
#include <string>
#include <vector>

#include "npz/invariant.hpp"
#include "npz/model.hpp"
#include "npz/sde.hpp"

namespace npz {

enum class Regime { TotalExtinction, PhytoplanktonOnly, Coexistence, Inconclusive };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

inline constexpr double kDefaultTol = 1e-6;
inline constexpr double kLambda1QuadTol = 1e-10;
inline constexpr double kLambda1Agreement = 1e-8;

enum class Lambda1Method { ClosedForm, Quadrature };
std::string to_string(Lambda1Method m);

struct Lambda1Result {
    double value = 0.0;
    Lambda1Method method = Lambda1Method::Quadrature;
    double quadrature_value = 0.0;
    std::optional<double> closed_form_value;
};

// Invasion rate of phytoplankton into the nutrient-only stationary law:
// E[F1(X, 0) X] - alpha2 - sigma2^2 / 2 with X inverse Gamma.
// Constant kernels use a * Lambda / alpha1 - alpha2 - sigma2^2 / 2 and are cross-checked
// against quadrature (ToleranceNotMet if the two disagree beyond kLambda1Agreement).
Lambda1Result lambda1(const ModelParams& p, const FunctionalResponse& f1,
                      double quad_tol = kLambda1QuadTol);

// ell_theta = E[F1(X, 0) X] under the shifted law mu^theta.
double ell_theta(const ModelParams& p, const FunctionalResponse& f1, double theta,
                 double quad_tol = kLambda1QuadTol);

struct BoundaryMoments {
    double mean_x = 0.0;
    double mean_y = 0.0;
};

// Stationary means of the nutrient-phytoplankton subsystem with F1 = a, from
//   E[a X - alpha2 - sigma2^2 / 2] = 0  and  Lambda - alpha1 E[X] - (alpha2 - alpha4) E[Y] = 0.
// NotApplicable when lambda1 <= 0.
BoundaryMoments boundary_moments_constant(const ModelParams& p, double a);

// b E[Y] - alpha3 - sigma3^2 / 2 for constant kernels F1 = a, F2 = b.
double lambda2_closed_form_constant(const ModelParams& p, double a, double b);

struct Lambda2Estimate {
    Estimate estimate;  // of lambda2 itself
    bool straddles_zero = false;
};

// Monte Carlo invasion rate of zooplankton: time average of F2(y, 0) y over a long
// run of the boundary subsystem, minus alpha3 + sigma3^2 / 2.
// PreconditionError unless lambda1 > tol.
Lambda2Estimate lambda2_estimate(const Model& m, const SimConfig& cfg, double x0 = 1.0,
                                 double y0 = 1.0, double tol = kDefaultTol);

Regime classify(double lambda1, std::optional<double> lambda2, double tol);
// Separate bands; a Monte Carlo lambda2 uses its CI half-width as band.
Regime classify(double lambda1, std::optional<double> lambda2, double tol1, double tol2);

struct ThresholdOptions {
    double tol = kDefaultTol;
    double x0 = 1.0;
    double y0 = 1.0;
    // Also run the Monte Carlo estimate when both kernels are constant.
    bool monte_carlo_for_constant = true;
};

struct ThresholdReport {
    ModelParams params;
    Lambda1Result lambda1;
    std::optional<double> lambda2;
    std::optional<Estimate> lambda2_mc;
    std::optional<double> lambda2_closed_form;
    std::string lambda2_method;  // "closed_form", "monte_carlo" or "" when absent
    Regime regime = Regime::Inconclusive;
    double tol = kDefaultTol;
};

ThresholdReport evaluate_thresholds(const Model& m, const SimConfig& cfg,
                                    const ThresholdOptions& opts = {});

// Names accepted on a regime-map axis: the ModelParams field names and
// "f1.<p>" / "f2.<p>" for response parameters ("a", "h", "k").
Model with_parameter(const Model& base, const std::string& name, double value);
double get_parameter(const Model& m, const std::string& name);

struct Axis {
    std::string param;
    std::vector<double> values;
};

inline constexpr std::size_t kMaxGridCells = 10000;

struct RegimeMapCell {
    std::size_t row = 0;  // index along axis1
    std::size_t col = 0;  // index along axis2
    double value1 = 0.0;
    double value2 = 0.0;
    ThresholdReport report;
};

struct RegimeMap {
    Axis axis1;
    Axis axis2;
    std::vector<RegimeMapCell> cells;  // row-major (axis1 outer)
};

// Every cell gets lambda1 by quadrature (closed form when constant) and lambda2 by the
// closed form when both kernels are constant, otherwise by Monte Carlo with the same
// seed in every cell.
RegimeMap regime_map(const Model& base, const Axis& axis1, const Axis& axis2, const SimConfig& cfg,
                     const ThresholdOptions& opts = {});

}  // namespace npz
