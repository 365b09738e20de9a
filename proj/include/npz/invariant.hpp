#pragma once

#include <functional>
#include <span>
#include <vector>

#include "npz/model.hpp"
#include "npz/quadrature.hpp"
#include "npz/rng.hpp"
#include "npz/sde.hpp"

namespace npz {

// Stationary law of dX = (Lambda + theta - alpha1 X) dt + sigma1 X dW:
// inverse Gamma with shape 1 + 2 alpha1 / sigma1^2 and scale 2 (Lambda + theta) / sigma1^2.
struct InverseGamma {
    double shape = 0.0;
    double scale = 0.0;
    double theta = 0.0;

    double mean() const;
    // E[X^k]; finite iff k < shape. Throws NotApplicable otherwise.
    double moment(double k) const;
    double cdf(double u) const;
};

InverseGamma invgamma_from_params(const ModelParams& p, double theta = 0.0);

double invgamma_density(const InverseGamma& d, double u);

// beta / G with G ~ Gamma(shape, 1), drawn from the given stream.
std::vector<double> invgamma_sample(const InverseGamma& d, RngStream& stream, std::size_t n);

// Integral of f against the law. After v = scale / u the integrand becomes
// f(scale / v) times the Gamma(shape, 1) density, which is split at v = shape:
// the upper piece is covered by geometrically growing panels until the Gamma weight
// falls below 1e-16 of its peak, the lower piece is mapped through v = shape * exp(-s)
// so that integrability at u -> infinity shows up as exponential decay in s.
// Throws ToleranceNotMet if either piece fails to converge (e.g. divergent moments).
QuadratureResult quadrature_against_invgamma(const InverseGamma& d,
                                             const std::function<double(double)>& f,
                                             double tol = 1e-10);

// Point estimate with a 95% confidence interval.
struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;
    double std_error = 0.0;
    std::size_t n_batches = 0;
    std::size_t n_samples = 0;

    double lo() const { return mean - half_width; }
    double hi() const { return mean + half_width; }
    bool covers(double v) const { return lo() <= v && v <= hi(); }
};

using StateFn = std::function<double(const State&)>;

inline constexpr std::size_t kDefaultBatches = 20;

// Time average of g over records with t >= burn_in, batch-means CI (Student t).
Estimate ergodic_average(const Trajectory& traj, const StateFn& g, double burn_in,
                         std::size_t n_batches = kDefaultBatches);

// Pools n_batches equal batches from every path.
Estimate ergodic_average(std::span<const Trajectory> ensemble, const StateFn& g, double burn_in,
                         std::size_t n_batches = kDefaultBatches);

// Log-spaced bin edges per coordinate (x, then y, then z). Edges are stored as
// natural logs. The two outer bins pad the observed range and also absorb any
// out-of-range sample.
struct LogGrid {
    std::vector<std::vector<double>> log_edges;

    std::size_t dims() const { return log_edges.size(); }
    std::size_t bins_per_dim() const { return log_edges.empty() ? 0 : log_edges[0].size() - 1; }
    std::size_t n_cells() const;
    bool operator==(const LogGrid&) const = default;
};

struct EmpiricalMeasure {
    LogGrid grid;
    std::vector<double> masses;  // row-major over (x, y, z) bins
    std::size_t n_samples = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;

    double total_mass() const;
};

inline constexpr std::size_t kMinBins = 8;

// Grid spanning all records in [t_lo, t_hi] of every path.
LogGrid make_log_grid(std::span<const Trajectory> ensemble, std::size_t dims, std::size_t n_bins,
                      double t_lo, double t_hi);

EmpiricalMeasure occupation_histogram(std::span<const Trajectory> ensemble, const LogGrid& grid,
                                      double t_lo, double t_hi);

// Histogram of a single path after burn-in on its own grid.
EmpiricalMeasure occupation_histogram(const Trajectory& traj, std::size_t dims, std::size_t n_bins,
                                      double burn_in);

// Half the L1 distance between masses; the grids must coincide.
double tv_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// Values of coordinate (0 = x, 1 = y, 2 = z) recorded in [t_lo, t_hi].
std::vector<double> collect_component(std::span<const Trajectory> ensemble, int component,
                                      double t_lo, double t_hi);

// Kolmogorov-Smirnov distance between the sample's ECDF and the law's CDF.
double ks_distance(std::span<const double> samples, const InverseGamma& d);

// sup over interior edges of |cumulative mass - CDF(edge)| for a 1D histogram.
double histogram_cdf_gap(const EmpiricalMeasure& m, const InverseGamma& d);

}  // namespace npz
