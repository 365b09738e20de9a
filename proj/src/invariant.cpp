#include "npz/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "npz/error.hpp"

namespace npz {

namespace {

constexpr double kWeightCutoff = 1e-16;
// Smallest s such that shape * exp(-s) is still a normal double for any sane shape.
constexpr double kMaxLogPanel = 32.0;
constexpr double kMaxLogSpan = 700.0;
constexpr std::size_t kMaxPanels = 64;

double t_quantile_975(std::size_t df) {
    return boost::math::quantile(boost::math::students_t(static_cast<double>(df)), 0.975);
}

double log_of(const Trajectory& tr, std::size_t i, int component) {
    switch (component) {
        case 0: return tr.states[i].x > 0.0 ? std::log(tr.states[i].x)
                                            : -std::numeric_limits<double>::infinity();
        case 1: return tr.log_y[i];
        default: return tr.log_z[i];
    }
}

template <class Fn>
void for_each_record(std::span<const Trajectory> ensemble, double t_lo, double t_hi, Fn&& fn) {
    for (const auto& tr : ensemble) {
        const auto first = std::lower_bound(tr.times.begin(), tr.times.end(), t_lo);
        for (auto it = first; it != tr.times.end() && *it <= t_hi; ++it) {
            fn(tr, static_cast<std::size_t>(it - tr.times.begin()));
        }
    }
}

std::size_t bin_index(const std::vector<double>& edges, double l) {
    const std::size_t n = edges.size() - 1;
    if (!(l > edges.front())) return 0;
    const double w = edges[1] - edges[0];
    const auto k = static_cast<std::size_t>(std::floor((l - edges.front()) / w));
    return std::min(k, n - 1);
}

// Batch means of g over one path's post-burn-in records, appended to out.
std::size_t append_batches(const Trajectory& tr, const StateFn& g, double burn_in,
                           std::size_t n_batches, std::vector<double>& out) {
    if (tr.size() < 2) throw PreconditionError("ergodic_average: trajectory too short");
    if (!(tr.t_end() > 2.0 * burn_in)) {
        throw PreconditionError("ergodic_average: horizon must exceed twice the burn-in");
    }
    const auto first = std::lower_bound(tr.times.begin(), tr.times.end(), burn_in);
    const auto start = static_cast<std::size_t>(first - tr.times.begin());
    const std::size_t m = tr.size() - start;
    const std::size_t b = m / n_batches;
    if (b == 0) throw PreconditionError("ergodic_average: fewer records than batches");
    // Drop the oldest remainder so every batch has b records.
    std::size_t i = start + (m - b * n_batches);
    for (std::size_t k = 0; k < n_batches; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < b; ++j, ++i) sum += g(tr.states[i]);
        out.push_back(sum / static_cast<double>(b));
    }
    return b * n_batches;
}

Estimate from_batches(const std::vector<double>& batches, std::size_t n_samples) {
    Estimate e;
    e.n_batches = batches.size();
    e.n_samples = n_samples;
    const double n = static_cast<double>(batches.size());
    double mean = 0.0;
    for (double v : batches) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : batches) ss += (v - mean) * (v - mean);
    e.mean = mean;
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
    e.half_width = t_quantile_975(batches.size() - 1) * e.std_error;
    return e;
}

}  // namespace

double InverseGamma::mean() const { return scale / (shape - 1.0); }

double InverseGamma::moment(double k) const {
    if (!(k < shape)) throw NotApplicable("inverse Gamma moment of order >= shape is infinite");
    const double r = std::round(k);
    if (r == k && k >= 0.0) {
        double v = 1.0;
        for (int j = 1; j <= static_cast<int>(k); ++j) v *= scale / (shape - j);
        return v;
    }
    return std::exp(k * std::log(scale) + std::lgamma(shape - k) - std::lgamma(shape));
}

double InverseGamma::cdf(double u) const {
    if (u <= 0.0) return 0.0;
    return boost::math::gamma_q(shape, scale / u);
}

InverseGamma invgamma_from_params(const ModelParams& p, double theta) {
    if (!(p.sigma1 > 0.0)) throw PreconditionError("inverse Gamma law needs sigma1 > 0");
    if (!(theta >= 0.0)) throw PreconditionError("theta must be nonnegative");
    if (!(p.alpha1 > 0.0) || !(p.lambda_input > 0.0)) {
        throw PreconditionError("inverse Gamma law needs alpha1 > 0 and lambda_input > 0");
    }
    const double s2 = p.sigma1 * p.sigma1;
    return {1.0 + 2.0 * p.alpha1 / s2, 2.0 * (p.lambda_input + theta) / s2, theta};
}

double invgamma_density(const InverseGamma& d, double u) {
    if (!(u > 0.0)) throw PreconditionError("inverse Gamma density is supported on u > 0");
    const double log_g = d.shape * std::log(d.scale) - std::lgamma(d.shape) -
                         (d.shape + 1.0) * std::log(u) - d.scale / u;
    return std::exp(log_g);
}

std::vector<double> invgamma_sample(const InverseGamma& d, RngStream& stream, std::size_t n) {
    if (n < 1) throw PreconditionError("invgamma_sample: n must be >= 1");
    std::vector<double> out(n);
    for (auto& v : out) v = d.scale / stream.next_gamma(d.shape);
    return out;
}

QuadratureResult quadrature_against_invgamma(const InverseGamma& d,
                                             const std::function<double(double)>& f,
                                             double tol) {
    if (!(tol > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
    const double a = d.shape;
    const double beta = d.scale;
    const double log_norm = std::lgamma(a);
    auto weight = [&](double v) { return std::exp((a - 1.0) * std::log(v) - v - log_norm); };
    // An underflowed weight short-circuits f, which may overflow as u = beta / v -> inf.
    // An overflow with a live weight is left to poison the sum: the tail is then beyond
    // double range and the tolerance cannot be certified.
    auto integrand = [&](double v) {
        const double w = v > 0.0 ? weight(v) : 0.0;
        return w > 0.0 ? f(beta / v) * w : 0.0;
    };

    const double split = a;
    const double peak_weight = weight(std::max(a - 1.0, std::numeric_limits<double>::min()));
    const double panel_tol = tol / (2.0 * kMaxPanels);

    QuadratureResult total;
    auto add = [&](const QuadratureResult& r) {
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
    };

    // Upper piece: v in [split, inf), i.e. u in (0, beta / split].
    const double width = std::max(1.0, std::sqrt(a));
    double lo = split;
    bool done = false;
    for (std::size_t k = 0; k < kMaxPanels && !done; ++k) {
        const double hi = split + width * (std::ldexp(1.0, static_cast<int>(k) + 1) - 1.0);
        const auto r = integrate_gk15(integrand, lo, hi, panel_tol);
        add(r);
        done = weight(hi) < kWeightCutoff * peak_weight && std::abs(r.value) <= panel_tol;
        lo = hi;
    }
    if (!done) throw ToleranceNotMet("upper tail of the Gamma-weighted integrand did not vanish");

    // Lower piece: v = split * exp(-s), s in [0, kMaxLogSpan].
    auto mapped = [&](double s) {
        const double v = split * std::exp(-s);
        return integrand(v) * v;
    };
    double peak = 0.0;
    lo = 0.0;
    done = false;
    for (std::size_t k = 0; lo < kMaxLogSpan && !done; ++k) {
        // Panels double up to a fixed width so that a slowly decaying tail is left before
        // f(u) overflows.
        const double hi = std::min(kMaxLogSpan, k == 0 ? 1.0 : lo + std::min(lo, kMaxLogPanel));
        const auto r = integrate_gk15(mapped, lo, hi, panel_tol);
        add(r);
        const double head = std::abs(mapped(lo));
        peak = std::max({peak, head, std::abs(r.value) / (hi - lo)});
        const double tail = std::abs(mapped(hi));
        if (tail <= kWeightCutoff * peak && std::abs(r.value) <= panel_tol) {
            done = true;
        } else if (tail > 0.0 && tail < head) {
            // Remaining mass if the decay seen across this panel continues.
            const double rest = tail * (hi - lo) / std::log(head / tail);
            if (rest <= panel_tol) {
                total.error += rest;
                done = true;
            }
        }
        lo = hi;
    }
    if (!done) {
        throw ToleranceNotMet("integrand does not decay as u -> infinity (moment may not exist)");
    }
    if (!(total.error <= tol)) {
        throw ToleranceNotMet("quadrature error estimate " + std::to_string(total.error) +
                              " exceeds tolerance");
    }
    return total;
}

Estimate ergodic_average(const Trajectory& traj, const StateFn& g, double burn_in,
                         std::size_t n_batches) {
    return ergodic_average(std::span<const Trajectory>(&traj, 1), g, burn_in, n_batches);
}

Estimate ergodic_average(std::span<const Trajectory> ensemble, const StateFn& g, double burn_in,
                         std::size_t n_batches) {
    if (ensemble.empty()) throw PreconditionError("ergodic_average: empty ensemble");
    if (n_batches < 2) throw PreconditionError("ergodic_average: need at least 2 batches");
    std::vector<double> batches;
    batches.reserve(ensemble.size() * n_batches);
    std::size_t n_samples = 0;
    for (const auto& tr : ensemble) n_samples += append_batches(tr, g, burn_in, n_batches, batches);
    return from_batches(batches, n_samples);
}

std::size_t LogGrid::n_cells() const {
    std::size_t n = 1;
    for (const auto& e : log_edges) n *= e.size() - 1;
    return n;
}

double EmpiricalMeasure::total_mass() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

LogGrid make_log_grid(std::span<const Trajectory> ensemble, std::size_t dims, std::size_t n_bins,
                      double t_lo, double t_hi) {
    if (dims < 1 || dims > 3) throw PreconditionError("histogram dims must be 1, 2 or 3");
    if (n_bins < kMinBins) throw PreconditionError("histogram needs at least 8 bins per dimension");
    std::vector<double> lmin(dims, std::numeric_limits<double>::infinity());
    std::vector<double> lmax(dims, -std::numeric_limits<double>::infinity());
    std::size_t count = 0;
    for_each_record(ensemble, t_lo, t_hi, [&](const Trajectory& tr, std::size_t i) {
        ++count;
        for (std::size_t c = 0; c < dims; ++c) {
            const double l = log_of(tr, i, static_cast<int>(c));
            if (std::isfinite(l)) {
                lmin[c] = std::min(lmin[c], l);
                lmax[c] = std::max(lmax[c], l);
            }
        }
    });
    if (count == 0) throw PreconditionError("occupation histogram: empty time window");

    LogGrid grid;
    for (std::size_t c = 0; c < dims; ++c) {
        double lo = lmin[c], hi = lmax[c];
        if (!std::isfinite(lo)) lo = hi = 0.0;
        if (hi - lo < 1e-9) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double w = (hi - lo) / static_cast<double>(n_bins - 2);
        std::vector<double> edges(n_bins + 1);
        for (std::size_t k = 0; k <= n_bins; ++k) edges[k] = lo - w + w * static_cast<double>(k);
        grid.log_edges.push_back(std::move(edges));
    }
    return grid;
}

EmpiricalMeasure occupation_histogram(std::span<const Trajectory> ensemble, const LogGrid& grid,
                                      double t_lo, double t_hi) {
    EmpiricalMeasure m;
    m.grid = grid;
    m.t_lo = t_lo;
    m.t_hi = t_hi;
    std::vector<std::size_t> counts(grid.n_cells(), 0);
    const std::size_t nb = grid.bins_per_dim();
    for_each_record(ensemble, t_lo, t_hi, [&](const Trajectory& tr, std::size_t i) {
        std::size_t cell = 0;
        for (std::size_t c = 0; c < grid.dims(); ++c) {
            cell = cell * nb + bin_index(grid.log_edges[c], log_of(tr, i, static_cast<int>(c)));
        }
        ++counts[cell];
        ++m.n_samples;
    });
    if (m.n_samples == 0) throw PreconditionError("occupation histogram: empty time window");
    m.masses.resize(counts.size());
    const double n = static_cast<double>(m.n_samples);
    for (std::size_t k = 0; k < counts.size(); ++k) m.masses[k] = static_cast<double>(counts[k]) / n;
    return m;
}

EmpiricalMeasure occupation_histogram(const Trajectory& traj, std::size_t dims, std::size_t n_bins,
                                      double burn_in) {
    std::span<const Trajectory> one(&traj, 1);
    const double t_hi = traj.t_end();
    return occupation_histogram(one, make_log_grid(one, dims, n_bins, burn_in, t_hi), burn_in, t_hi);
}

double tv_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (!(a.grid == b.grid)) throw PreconditionError("tv_distance: histograms use different grids");
    double s = 0.0;
    for (std::size_t k = 0; k < a.masses.size(); ++k) s += std::abs(a.masses[k] - b.masses[k]);
    return std::min(1.0, 0.5 * s);
}

std::vector<double> collect_component(std::span<const Trajectory> ensemble, int component,
                                      double t_lo, double t_hi) {
    std::vector<double> out;
    for_each_record(ensemble, t_lo, t_hi, [&](const Trajectory& tr, std::size_t i) {
        const auto& s = tr.states[i];
        out.push_back(component == 0 ? s.x : component == 1 ? s.y : s.z);
    });
    return out;
}

double ks_distance(std::span<const double> samples, const InverseGamma& d) {
    if (samples.empty()) throw PreconditionError("ks_distance: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = d.cdf(sorted[i]);
        gap = std::max({gap, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return gap;
}

double histogram_cdf_gap(const EmpiricalMeasure& m, const InverseGamma& d) {
    if (m.grid.dims() != 1) throw PreconditionError("histogram_cdf_gap needs a 1D histogram");
    const auto& edges = m.grid.log_edges[0];
    double cum = 0.0, gap = 0.0;
    for (std::size_t k = 0; k + 1 < m.masses.size(); ++k) {
        cum += m.masses[k];
        gap = std::max(gap, std::abs(cum - d.cdf(std::exp(edges[k + 1]))));
    }
    return gap;
}

}  // namespace npz
