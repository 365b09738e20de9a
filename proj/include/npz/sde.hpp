#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "npz/model.hpp"

namespace npz {

enum class Scheme { HybridLogEuler, PlainEuler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

inline constexpr double kMaxDt = 0.01;
inline constexpr double kOverflowThreshold = 1e300;

struct SimConfig {
    double dt = 1e-3;
    double t_end = 100.0;
    double burn_in = 10.0;
    std::size_t subsample_every = 1;
    std::uint64_t seed = 0;
    std::size_t n_paths = 1;
    Scheme scheme = Scheme::HybridLogEuler;

    // Throws PreconditionError when an invariant fails.
    void validate() const;
    std::uint64_t n_steps() const;
};

// Recorded path. States are sampled every subsample_every steps starting at t = 0.
// log_y / log_z hold the integrator's log coordinates (-inf once a component is
// exactly zero) so that deep extinction does not underflow.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> log_y;
    std::vector<double> log_z;
    SimConfig config;
    std::uint32_t path_id = 0;
    std::uint64_t steps = 0;
    std::uint64_t clamp_events = 0;

    std::size_t size() const noexcept { return times.size(); }
    double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

// One step of the hybrid scheme from a plain state. gaussians are standard normals
// for (W1, W2, W3). clamped, when given, is incremented if x was clamped at zero.
State step_hybrid(const Model& m, const State& s, double dt, const Vec3& gaussians,
                  std::uint64_t* clamped = nullptr);

// Plain Euler-Maruyama on all three coordinates, each clamped at zero.
State step_euler(const Model& m, const State& s, double dt, const Vec3& gaussians,
                 std::uint64_t* clamped = nullptr);

Trajectory simulate_full3d(const Model& m, const State& init, const SimConfig& cfg,
                           std::uint32_t path_id = 0);

// Nutrient-phytoplankton subsystem; the z column is identically zero.
Trajectory simulate_boundary2d(const ModelParams& p, const FunctionalResponse& f1, double x0,
                               double y0, const SimConfig& cfg, std::uint32_t path_id = 0);

// Nutrient equation alone; y and z columns are identically zero.
Trajectory simulate_nutrient1d(const ModelParams& p, double x0, const SimConfig& cfg,
                               std::uint32_t path_id = 0);

// Runs paths [first_path, first_path + cfg.n_paths) concurrently; output is ordered
// by path id irrespective of scheduling.
std::vector<Trajectory> simulate_ensemble(const Model& m, const State& init, const SimConfig& cfg,
                                          std::uint32_t first_path = 0);
std::vector<Trajectory> simulate_boundary2d_ensemble(const ModelParams& p,
                                                     const FunctionalResponse& f1, double x0,
                                                     double y0, const SimConfig& cfg,
                                                     std::uint32_t first_path = 0);
std::vector<Trajectory> simulate_nutrient1d_ensemble(const ModelParams& p, double x0,
                                                     const SimConfig& cfg,
                                                     std::uint32_t first_path = 0);

// Applies fn(i) for i in [0, n) on a small worker pool; exceptions are rethrown for
// the lowest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct ConvergenceOrder {
    double order = 0.0;
    double error_coarse = 0.0;  // mean |S_dt - S_dt/2| at the endpoint
    double error_fine = 0.0;    // mean |S_dt/2 - S_dt/4| at the endpoint
    std::size_t n_paths = 0;
};

inline constexpr std::size_t kMinConvergencePaths = 32;

// Strong self-convergence estimate from three coupled resolutions dt, dt/2, dt/4
// driven by one Brownian path (coarse increments are sums of fine ones).
ConvergenceOrder self_convergence_order(const Model& m, const State& init, const SimConfig& cfg);

}  // namespace npz
