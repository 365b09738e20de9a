#include "npz/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "npz/cli/config.hpp"
#include "npz/cli/io.hpp"
#include "npz/cli/report.hpp"
#include "npz/diagnostics.hpp"
#include "npz/error.hpp"
#include "npz/sde.hpp"
#include "npz/thresholds.hpp"

namespace npz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const State kDefaultInit{1.0, 1.0, 1.0};

RunConfig load_with_overrides(const CliOptions& o) {
    RunConfig c = load_config(o.config_path);
    if (const char* env = std::getenv(kOutDirEnv); env && *env) c.output.out_dir = env;
    if (o.out_dir) c.output.out_dir = *o.out_dir;
    if (o.formats) c.output.formats = split_formats(*o.formats);
    if (o.seed) c.sim.seed = *o.seed;
    if (o.paths) c.sim.n_paths = *o.paths;
    if (o.dt) c.sim.dt = *o.dt;
    if (o.t_end) {
        c.sim.t_end = *o.t_end;
        if (!c.burn_in_explicit) c.sim.burn_in = 0.1 * c.sim.t_end;
    }
    try {
        c.sim.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("sim: ") + e.what());
    }
    return c;
}

// Exit code 2 unless the model satisfies every assumption.
bool require_valid(const RunConfig& c, std::ostream& err) {
    const auto rep = validate_params(c.model);
    if (rep.passed()) return true;
    err << "model assumptions violated:\n" << dump(to_json(rep));
    return false;
}

void emit(const RunConfig& c, const std::string& name, const json& j, std::ostream& out) {
    const std::string text = dump(j);
    out << text;
    if (c.output.wants("json")) write_atomic(fs::path(c.output.out_dir) / name, text);
}

double tol_of(const RunConfig& c, const CliOptions& o) {
    return o.tol.value_or(c.experiment.tol.value_or(kDefaultTol));
}

int cmd_validate(const CliOptions& o, std::ostream& out) {
    const RunConfig c = load_config(o.config_path);
    const auto rep = validate_params(c.model);
    out << dump(to_json(rep));
    return rep.passed() ? kExitPass : kExitClaimFailed;
}

int cmd_simulate(const CliOptions& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load_with_overrides(o);
    if (!require_valid(c, err)) return kExitUsage;
    const State init = c.experiment.init.value_or(kDefaultInit);
    const Trajectory tr = simulate_full3d(c.model, init, c.sim);
    const fs::path dir(c.output.out_dir);
    const json meta = run_meta(tr);
    if (c.output.wants("csv")) write_atomic(dir / "trajectory.csv", trajectory_csv(tr));
    if (c.output.wants("json")) write_atomic(dir / "run_meta.json", dump(meta));
    if (c.output.wants("svg")) {
        std::vector<double> xs, ys, zs;
        for (const auto& s : tr.states) {
            xs.push_back(s.x);
            ys.push_back(s.y);
            zs.push_back(s.z);
        }
        write_atomic(dir / "trajectory.svg",
                     svg_line_plot("trajectory (seed " + std::to_string(c.sim.seed) + ")",
                                   tr.times,
                                   {{"x", "#1f77b4", xs}, {"y", "#2ca02c", ys}, {"z", "#d62728", zs}}));
    }
    out << dump(meta);
    return kExitPass;
}

int cmd_classify(const CliOptions& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load_with_overrides(o);
    if (!require_valid(c, err)) return kExitUsage;
    ThresholdOptions topts;
    topts.tol = tol_of(c, o);
    if (c.experiment.init) {
        topts.x0 = c.experiment.init->x;
        topts.y0 = c.experiment.init->y;
    }
    const auto rep = evaluate_thresholds(c.model, c.sim, topts);
    json j = to_json(rep);
    j["responses"] = {{"f1", to_json(c.model.f1)}, {"f2", to_json(c.model.f2)}};
    j["sim"] = {{"seed", c.sim.seed}, {"n_paths", c.sim.n_paths}, {"t_end", c.sim.t_end},
                {"dt", c.sim.dt},     {"burn_in", c.sim.burn_in}};
    emit(c, "threshold_report.json", j, out);
    return kExitPass;
}

int cmd_regime_map(const CliOptions& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load_with_overrides(o);
    if (!require_valid(c, err)) return kExitUsage;
    std::optional<Axis> a1 = o.axis1 ? std::optional<Axis>(parse_axis(*o.axis1)) : c.experiment.axis1;
    std::optional<Axis> a2 = o.axis2 ? std::optional<Axis>(parse_axis(*o.axis2)) : c.experiment.axis2;
    if (!a1 || !a2) throw ConfigError("regime-map needs --axis1 and --axis2 (or experiment axes)");
    ThresholdOptions topts;
    topts.tol = tol_of(c, o);
    const auto map = regime_map(c.model, *a1, *a2, c.sim, topts);
    const fs::path dir(c.output.out_dir);
    if (c.output.wants("csv")) write_atomic(dir / "regime_map.csv", regime_map_csv(map));
    if (c.output.wants("svg")) write_atomic(dir / "regime_map.svg", svg_regime_heatmap(map));
    emit(c, "regime_map.json", to_json(map), out);
    return kExitPass;
}

int cmd_diagnose(const CliOptions& o, std::ostream& out, std::ostream& err) {
    if (!o.check) throw ConfigError("diagnose needs --check");
    const std::string& check = *o.check;
    if (check != "extinction" && check != "moments" && check != "negmoment" &&
        check != "convergence") {
        throw ConfigError("unknown check '" + check + "'");
    }
    const RunConfig c = load_with_overrides(o);
    const auto validation = validate_params(c.model);
    if (!validation.passed()) {
        err << "model assumptions violated:\n" << dump(to_json(validation));
        return kExitUsage;
    }
    const auto& e = c.experiment;
    const std::string file = "diagnose_" + check + ".json";
    auto finish = [&](const json& j, bool passed) {
        emit(c, file, j, out);
        return passed ? kExitPass : kExitClaimFailed;
    };

    try {
        if (check == "extinction") {
            ThresholdOptions topts;
            topts.tol = tol_of(c, o);
            topts.monte_carlo_for_constant = false;
            const auto thr = evaluate_thresholds(c.model, c.sim, topts);
            ExtinctionCheckOptions eo;
            eo.init = e.init.value_or(kDefaultInit);
            if (e.window) {
                eo.t_lo = e.window->first;
                eo.t_hi = e.window->second;
            }
            eo.abs_tol = e.abs_tol.value_or(eo.abs_tol);
            eo.n_std_errors = e.n_std_errors.value_or(eo.n_std_errors);
            eo.target_shift = e.target_shift.value_or(0.0);
            const auto rep = extinction_rate_check(c.model, thr.regime, c.sim, eo);
            return finish(to_json(rep), rep.passed);
        }
        if (check == "moments") {
            const double q0 = validation.derived->q0;
            const double q = e.q.value_or(q0);
            CurveThresholds th;
            th.plateau_lo = e.plateau_lo.value_or(th.plateau_lo);
            th.plateau_hi = e.plateau_hi.value_or(th.plateau_hi);
            th.tail_factor = e.tail_factor.value_or(th.tail_factor);
            if (q > q0) {
                err << "moment exponent q=" << q << " exceeds q0=" << q0 << "\n";
                return kExitUsage;
            }
            const auto paths = simulate_ensemble(c.model, e.init.value_or(kDefaultInit), c.sim);
            auto rep = moment_bound_check(paths, q, q0, th);
            json j = to_json(rep);
            j["q0"] = q0;
            return finish(j, rep.passed);
        }
        if (check == "negmoment") {
            const State init = e.init.value_or(kDefaultInit);
            const auto rep =
                negative_moment_check(c.model.params, c.model.f1, e.theta.value_or(0.1), c.sim,
                                      init.x, init.y, e.tail_factor.value_or(2.0));
            return finish(to_json(rep), rep.passed);
        }
        ConvergenceOptions co;
        co.dims = e.dims.value_or(co.dims);
        co.n_bins = e.n_bins.value_or(co.n_bins);
        co.n_windows = e.n_windows.value_or(co.n_windows);
        co.tv_threshold = e.tv_threshold.value_or(co.tv_threshold);
        co.floor = e.floor.value_or(co.floor);
        co.seed_b = e.seed_b;
        const auto rep = convergence_check(c.model, e.init.value_or(State{0.1, 0.1, 0.1}),
                                           e.init_b.value_or(State{5.0, 5.0, 5.0}), c.sim, co);
        return finish(to_json(rep), rep.passed);
    } catch (const StepOverflow& ex) {
        return finish(json{{"check", check}, {"passed", false}, {"error", ex.what()},
                           {"overflow_time", ex.time()}},
                      false);
    }
}

}  // namespace

int run_command(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.command == "validate") return cmd_validate(opts, out);
        if (opts.command == "simulate") return cmd_simulate(opts, out, err);
        if (opts.command == "classify") return cmd_classify(opts, out, err);
        if (opts.command == "regime-map") return cmd_regime_map(opts, out, err);
        if (opts.command == "diagnose") return cmd_diagnose(opts, out, err);
        err << "unknown command '" << opts.command << "'\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << "\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
    }
    return kExitUsage;
}

}  // namespace npz::cli
