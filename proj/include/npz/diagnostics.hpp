#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npz/model.hpp"
#include "npz/sde.hpp"
#include "npz/thresholds.hpp"

namespace npz {

enum class Component { Y, Z };
std::string to_string(Component c);

// Minimum regression window, in steps of the trajectory's dt.
inline constexpr double kMinWindowSteps = 1000.0;

struct SlopeEstimate {
    Component component = Component::Y;
    double slope = 0.0;      // mean of per-path least-squares slopes of ln(component) vs t
    double std_error = 0.0;  // across paths
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t n_paths = 0;
};

SlopeEstimate log_slope(std::span<const Trajectory> ensemble, Component component, double t_lo,
                        double t_hi);

struct ExtinctionCheckOptions {
    State init{1.0, 1.0, 1.0};
    // Regression window; defaults to [t_end / 5, t_end].
    std::optional<double> t_lo;
    std::optional<double> t_hi;
    double abs_tol = 0.1;
    double n_std_errors = 3.0;
    // Added to every target; a nonzero shift is a negative control.
    double target_shift = 0.0;
};

struct SlopeCheck {
    std::string name;
    double target = 0.0;
    SlopeEstimate estimate;
    double tolerance = 0.0;  // max(abs_tol, n_std_errors * stderr)
    bool passed = false;
};

struct ExtinctionReport {
    Regime regime = Regime::Inconclusive;
    double lambda1 = 0.0;
    std::optional<double> lambda2;
    ExtinctionCheckOptions options;
    std::vector<SlopeCheck> checks;
    bool passed = false;
};

// TotalExtinction: Y-slope -> lambda1 and Z-slope -> -alpha3 - sigma3^2 / 2.
// PhytoplanktonOnly: Z-slope -> lambda2. Other regimes raise PreconditionError.
ExtinctionReport extinction_rate_check(const Model& m, Regime regime, const SimConfig& cfg,
                                       const ExtinctionCheckOptions& opts = {});

struct CurveThresholds {
    double plateau_lo = 0.8;
    double plateau_hi = 1.25;
    double tail_factor = 2.0;
};

struct MomentReport {
    double q = 0.0;
    std::vector<double> times;
    std::vector<double> curve;  // ensemble mean of (1 + X + Y + Z)^q
    double plateau_ratio = 0.0;
    double tail_max = 0.0;
    double tail_median = 0.0;
    CurveThresholds thresholds;
    bool passed = false;
};

// Moment curve and plateau test without the q <= q0 gate.
MomentReport moment_curve(std::span<const Trajectory> ensemble, double q,
                          const CurveThresholds& th = {});

// Same test restricted to q <= q0 (PreconditionError otherwise).
MomentReport moment_bound_check(std::span<const Trajectory> ensemble, double q, double q0,
                                const CurveThresholds& th = {});

struct NegativeMomentReport {
    double theta = 0.0;
    double lambda1 = 0.0;
    std::vector<double> times;
    std::vector<double> curve;  // ensemble mean of Y^(-theta) on the boundary subsystem
    double tail_max = 0.0;
    double tail_median = 0.0;
    double tail_factor = 2.0;
    bool passed = false;
};

NegativeMomentReport negative_moment_check(const ModelParams& p, const FunctionalResponse& f1,
                                           double theta, const SimConfig& cfg, double x0 = 1.0,
                                           double y0 = 1.0, double tail_factor = 2.0);

struct ConvergenceOptions {
    std::size_t dims = 3;
    std::size_t n_bins = 8;
    std::size_t n_windows = 10;
    double tv_threshold = 0.1;
    double floor = 1e-4;
    // Seed of the second ensemble; defaults to cfg.seed + 1.
    std::optional<std::uint64_t> seed_b;
    // Skip the regime precondition (callers that already classified).
    bool check_regime = true;
};

struct ConvergenceReport {
    ConvergenceOptions options;
    std::uint64_t seed_a = 0;
    std::uint64_t seed_b = 0;
    std::vector<double> window_ends;  // windows are [burn_in, window_end]
    std::vector<double> tv;
    double final_tv = 1.0;
    // Fraction of post-burn-in records with each component above options.floor.
    std::array<double, 3> fraction_above_floor{};
    bool passed = false;
};

// Occupation histograms of two ensembles started from init_a and init_b on a shared grid.
// dims = 3 requires Coexistence; dims <= 2 (the boundary marginal) requires lambda1 > 0.
ConvergenceReport convergence_check(const Model& m, const State& init_a, const State& init_b,
                                    const SimConfig& cfg, const ConvergenceOptions& opts = {});

}  // namespace npz
