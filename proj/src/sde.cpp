#include "npz/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "npz/error.hpp"
#include "npz/rng.hpp"

namespace npz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogOverflow = std::log(kOverflowThreshold);

// Integrator state: y and z are carried in log coordinates.
struct LogState {
    double x = 0.0;
    double ly = kNegInf;
    double lz = kNegInf;
};

LogState to_log(const State& s) { return {s.x, std::log(s.y), std::log(s.z)}; }

double from_log(double l) { return l == kNegInf ? 0.0 : std::exp(l); }

State from_log(const LogState& s) { return {s.x, from_log(s.ly), from_log(s.lz)}; }

void advance_hybrid(const Model& m, LogState& s, double dt, double sqrt_dt, const Vec3& g,
                    std::uint64_t& clamps) {
    const auto& p = m.params;
    const double y = from_log(s.ly);
    const double z = from_log(s.lz);
    const double f1 = m.f1(s.x, y);
    const double f2 = m.f2(y, z);

    const double dx = p.lambda_input - f1 * s.x * y - p.alpha1 * s.x + p.alpha4 * y + p.alpha5 * z;
    double x_next = s.x + dx * dt + p.sigma1 * s.x * sqrt_dt * g[0];
    if (x_next < 0.0) {
        x_next = 0.0;
        ++clamps;
    }
    if (s.ly != kNegInf) {
        s.ly += (f1 * s.x - f2 * z - p.alpha2 - 0.5 * p.sigma2 * p.sigma2) * dt +
                p.sigma2 * sqrt_dt * g[1];
    }
    if (s.lz != kNegInf) {
        s.lz += (f2 * y - p.alpha3 - 0.5 * p.sigma3 * p.sigma3) * dt + p.sigma3 * sqrt_dt * g[2];
    }
    s.x = x_next;
}

void advance_euler(const Model& m, State& s, double dt, double sqrt_dt, const Vec3& g,
                   std::uint64_t& clamps) {
    const auto& p = m.params;
    const double uptake = m.f1(s.x, s.y) * s.x * s.y;
    const double grazing = m.f2(s.y, s.z) * s.y * s.z;
    State next{
        s.x + (p.lambda_input - uptake - p.alpha1 * s.x + p.alpha4 * s.y + p.alpha5 * s.z) * dt +
            p.sigma1 * s.x * sqrt_dt * g[0],
        s.y + (uptake - grazing - p.alpha2 * s.y) * dt + p.sigma2 * s.y * sqrt_dt * g[1],
        s.z + (grazing - p.alpha3 * s.z) * dt + p.sigma3 * s.z * sqrt_dt * g[2],
    };
    for (double* c : {&next.x, &next.y, &next.z}) {
        if (*c < 0.0) {
            *c = 0.0;
            ++clamps;
        }
    }
    s = next;
}

void check_overflow(const LogState& s, double t) {
    if (!(s.x <= kOverflowThreshold)) throw StepOverflow(t, "nutrient x = " + std::to_string(s.x));
    if (std::isnan(s.ly) || s.ly > kLogOverflow) throw StepOverflow(t, "phytoplankton y");
    if (std::isnan(s.lz) || s.lz > kLogOverflow) throw StepOverflow(t, "zooplankton z");
}

void check_overflow(const State& s, double t) {
    for (double c : {s.x, s.y, s.z}) {
        if (!(c <= kOverflowThreshold)) throw StepOverflow(t, "coordinate " + std::to_string(c));
    }
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

void record(Trajectory& tr, double t, const LogState& s) {
    tr.times.push_back(t);
    tr.states.push_back(from_log(s));
    tr.log_y.push_back(s.ly);
    tr.log_z.push_back(s.lz);
}

void record(Trajectory& tr, double t, const State& s) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    tr.log_y.push_back(safe_log(s.y));
    tr.log_z.push_back(safe_log(s.z));
}

Trajectory run_path(const Model& m, const State& init, const SimConfig& cfg,
                    std::uint32_t path_id) {
    cfg.validate();
    check_state(init);

    Trajectory tr;
    tr.config = cfg;
    tr.path_id = path_id;
    tr.steps = cfg.n_steps();
    const std::size_t n_records = tr.steps / cfg.subsample_every + 1;
    tr.times.reserve(n_records);
    tr.states.reserve(n_records);
    tr.log_y.reserve(n_records);
    tr.log_z.reserve(n_records);

    RngStream w1(cfg.seed, path_id, Channel::W1);
    RngStream w2(cfg.seed, path_id, Channel::W2);
    RngStream w3(cfg.seed, path_id, Channel::W3);
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);

    auto drive = [&](auto& state, auto&& advance) {
        record(tr, 0.0, state);
        for (std::uint64_t k = 1; k <= tr.steps; ++k) {
            const Vec3 g{w1.next_normal(), w2.next_normal(), w3.next_normal()};
            advance(state, g);
            const double t = static_cast<double>(k) * dt;
            check_overflow(state, t);
            if (k % cfg.subsample_every == 0) record(tr, t, state);
        }
    };

    if (cfg.scheme == Scheme::HybridLogEuler) {
        LogState s = to_log(init);
        drive(s, [&](LogState& st, const Vec3& g) {
            advance_hybrid(m, st, dt, sqrt_dt, g, tr.clamp_events);
        });
    } else {
        State s = init;
        drive(s, [&](State& st, const Vec3& g) {
            advance_euler(m, st, dt, sqrt_dt, g, tr.clamp_events);
        });
    }
    return tr;
}

Model boundary_model(const ModelParams& p, const FunctionalResponse& f1) {
    return Model{p, f1, FunctionalResponse::constant(0.0)};
}

}  // namespace

std::string to_string(Scheme s) {
    return s == Scheme::HybridLogEuler ? "HybridLogEuler" : "PlainEuler";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "HybridLogEuler") return Scheme::HybridLogEuler;
    if (s == "PlainEuler") return Scheme::PlainEuler;
    throw PreconditionError("unknown scheme '" + s + "'");
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !(dt <= kMaxDt)) {
        throw PreconditionError("dt must satisfy 0 < dt <= " + std::to_string(kMaxDt));
    }
    if (!std::isfinite(t_end) || !(t_end > 0.0)) throw PreconditionError("t_end must be positive");
    if (!(burn_in >= 0.0) || !(burn_in < t_end)) {
        throw PreconditionError("burn_in must satisfy 0 <= burn_in < t_end");
    }
    if (n_paths < 1) throw PreconditionError("n_paths must be >= 1");
    if (subsample_every < 1) throw PreconditionError("subsample_every must be >= 1");
}

std::uint64_t SimConfig::n_steps() const {
    return static_cast<std::uint64_t>(std::ceil(t_end / dt - 1e-9));
}

State step_hybrid(const Model& m, const State& s, double dt, const Vec3& gaussians,
                  std::uint64_t* clamped) {
    check_state(s);
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    LogState ls = to_log(s);
    std::uint64_t clamps = 0;
    advance_hybrid(m, ls, dt, std::sqrt(dt), gaussians, clamps);
    check_overflow(ls, dt);
    if (clamped) *clamped += clamps;
    return from_log(ls);
}

State step_euler(const Model& m, const State& s, double dt, const Vec3& gaussians,
                 std::uint64_t* clamped) {
    check_state(s);
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    State out = s;
    std::uint64_t clamps = 0;
    advance_euler(m, out, dt, std::sqrt(dt), gaussians, clamps);
    check_overflow(out, dt);
    if (clamped) *clamped += clamps;
    return out;
}

Trajectory simulate_full3d(const Model& m, const State& init, const SimConfig& cfg,
                           std::uint32_t path_id) {
    return run_path(m, init, cfg, path_id);
}

Trajectory simulate_boundary2d(const ModelParams& p, const FunctionalResponse& f1, double x0,
                               double y0, const SimConfig& cfg, std::uint32_t path_id) {
    return run_path(boundary_model(p, f1), State{x0, y0, 0.0}, cfg, path_id);
}

Trajectory simulate_nutrient1d(const ModelParams& p, double x0, const SimConfig& cfg,
                               std::uint32_t path_id) {
    return run_path(boundary_model(p, FunctionalResponse::constant(0.0)), State{x0, 0.0, 0.0},
                    cfg, path_id);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<Trajectory> simulate_ensemble(const Model& m, const State& init, const SimConfig& cfg,
                                          std::uint32_t first_path) {
    cfg.validate();
    std::vector<Trajectory> out(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        out[i] = run_path(m, init, cfg, first_path + static_cast<std::uint32_t>(i));
    });
    return out;
}

std::vector<Trajectory> simulate_boundary2d_ensemble(const ModelParams& p,
                                                     const FunctionalResponse& f1, double x0,
                                                     double y0, const SimConfig& cfg,
                                                     std::uint32_t first_path) {
    return simulate_ensemble(boundary_model(p, f1), State{x0, y0, 0.0}, cfg, first_path);
}

std::vector<Trajectory> simulate_nutrient1d_ensemble(const ModelParams& p, double x0,
                                                     const SimConfig& cfg,
                                                     std::uint32_t first_path) {
    return simulate_ensemble(boundary_model(p, FunctionalResponse::constant(0.0)),
                             State{x0, 0.0, 0.0}, cfg, first_path);
}

ConvergenceOrder self_convergence_order(const Model& m, const State& init, const SimConfig& cfg) {
    cfg.validate();
    check_state(init);
    const std::size_t n_paths = std::max(cfg.n_paths, kMinConvergencePaths);
    const std::uint64_t n_coarse = cfg.n_steps();
    const double dt = cfg.dt;

    std::vector<double> err_coarse(n_paths), err_fine(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        const auto path = static_cast<std::uint32_t>(i);
        RngStream w[3] = {RngStream(cfg.seed, path, Channel::W1),
                          RngStream(cfg.seed, path, Channel::W2),
                          RngStream(cfg.seed, path, Channel::W3)};
        State coarse = init, mid = init, fine = init;
        std::uint64_t clamps = 0;
        auto step = [&](State& s, double h, const Vec3& g) {
            s = cfg.scheme == Scheme::HybridLogEuler ? step_hybrid(m, s, h, g, &clamps)
                                                     : step_euler(m, s, h, g, &clamps);
        };
        for (std::uint64_t k = 0; k < n_coarse; ++k) {
            std::array<Vec3, 4> g{};
            for (auto& gi : g) {
                for (int c = 0; c < 3; ++c) gi[c] = w[c].next_normal();
            }
            Vec3 g_mid0{}, g_mid1{}, g_coarse{};
            for (int c = 0; c < 3; ++c) {
                g_mid0[c] = (g[0][c] + g[1][c]) / std::numbers::sqrt2;
                g_mid1[c] = (g[2][c] + g[3][c]) / std::numbers::sqrt2;
                g_coarse[c] = (g[0][c] + g[1][c] + g[2][c] + g[3][c]) / 2.0;
            }
            for (const auto& gi : g) step(fine, dt / 4.0, gi);
            step(mid, dt / 2.0, g_mid0);
            step(mid, dt / 2.0, g_mid1);
            step(coarse, dt, g_coarse);
        }
        auto dist = [](const State& a, const State& b) {
            return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
        };
        err_coarse[i] = dist(coarse, mid);
        err_fine[i] = dist(mid, fine);
    });

    ConvergenceOrder out;
    out.n_paths = n_paths;
    for (std::size_t i = 0; i < n_paths; ++i) {
        out.error_coarse += err_coarse[i];
        out.error_fine += err_fine[i];
    }
    out.error_coarse /= static_cast<double>(n_paths);
    out.error_fine /= static_cast<double>(n_paths);
    out.order = std::log2(out.error_coarse / out.error_fine);
    return out;
}

}  // namespace npz
