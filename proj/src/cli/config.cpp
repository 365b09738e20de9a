#include "npz/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "npz/error.hpp"

namespace npz::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& section, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError("'" + where + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("'" + where + "' must be finite");
    return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& where) {
    if (!j.is_number_unsigned()) throw ConfigError("'" + where + "' must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

State state_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("'" + where + "' must be [x, y, z]");
    State s{number(j[0], where), number(j[1], where), number(j[2], where)};
    if (s.x < 0 || s.y < 0 || s.z < 0) throw ConfigError("'" + where + "' must be nonnegative");
    return s;
}

json state_to_json(const State& s) { return json::array({s.x, s.y, s.z}); }

Axis axis_from_json(const json& j, const std::string& where) {
    reject_unknown(j, where, {"param", "values"});
    if (!j.contains("param") || !j["param"].is_string()) {
        throw ConfigError("'" + where + ".param' must be a string");
    }
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
        throw ConfigError("'" + where + ".values' must be a nonempty array");
    }
    Axis a;
    a.param = j["param"].get<std::string>();
    for (const auto& v : j["values"]) a.values.push_back(number(v, where + ".values"));
    return a;
}

ModelParams params_from_json(const json& j) {
    reject_unknown(j, "model",
                   {"lambda_input", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "sigma1",
                    "sigma2", "sigma3"});
    ModelParams p;
    auto get = [&](const char* key, double& out) {
        if (!j.contains(key)) throw ConfigError(std::string("missing key 'model.") + key + "'");
        out = number(j[key], std::string("model.") + key);
    };
    get("lambda_input", p.lambda_input);
    get("alpha1", p.alpha1);
    get("alpha2", p.alpha2);
    get("alpha3", p.alpha3);
    get("alpha4", p.alpha4);
    get("alpha5", p.alpha5);
    get("sigma1", p.sigma1);
    get("sigma2", p.sigma2);
    get("sigma3", p.sigma3);
    return p;
}

SimConfig sim_from_json(const json& j, bool& burn_in_explicit) {
    reject_unknown(j, "sim",
                   {"dt", "t_end", "burn_in", "subsample_every", "seed", "n_paths", "scheme"});
    SimConfig s;
    if (j.contains("dt")) s.dt = number(j["dt"], "sim.dt");
    if (j.contains("t_end")) s.t_end = number(j["t_end"], "sim.t_end");
    burn_in_explicit = j.contains("burn_in");
    s.burn_in = burn_in_explicit ? number(j["burn_in"], "sim.burn_in") : 0.1 * s.t_end;
    if (j.contains("subsample_every")) {
        s.subsample_every = unsigned_int(j["subsample_every"], "sim.subsample_every");
    }
    if (j.contains("seed")) s.seed = unsigned_int(j["seed"], "sim.seed");
    if (j.contains("n_paths")) s.n_paths = unsigned_int(j["n_paths"], "sim.n_paths");
    if (j.contains("scheme")) {
        if (!j["scheme"].is_string()) throw ConfigError("'sim.scheme' must be a string");
        try {
            s.scheme = scheme_from_string(j["scheme"].get<std::string>());
        } catch (const PreconditionError& e) {
            throw ConfigError(e.what());
        }
    }
    return s;
}

ExperimentConfig experiment_from_json(const json& j) {
    reject_unknown(j, "experiment",
                   {"init", "init_b", "q", "theta", "window", "target_shift", "abs_tol",
                    "n_std_errors", "tol", "n_bins", "n_windows", "dims", "tv_threshold", "floor",
                    "seed_b", "plateau_lo", "plateau_hi", "tail_factor", "axis1", "axis2"});
    ExperimentConfig e;
    auto num = [&](const char* key, std::optional<double>& out) {
        if (j.contains(key)) out = number(j[key], std::string("experiment.") + key);
    };
    auto count = [&](const char* key, std::optional<std::size_t>& out) {
        if (j.contains(key)) out = unsigned_int(j[key], std::string("experiment.") + key);
    };
    if (j.contains("init")) e.init = state_from_json(j["init"], "experiment.init");
    if (j.contains("init_b")) e.init_b = state_from_json(j["init_b"], "experiment.init_b");
    num("q", e.q);
    num("theta", e.theta);
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (!w.is_array() || w.size() != 2) throw ConfigError("'experiment.window' must be [lo, hi]");
        e.window = {number(w[0], "experiment.window"), number(w[1], "experiment.window")};
    }
    num("target_shift", e.target_shift);
    num("abs_tol", e.abs_tol);
    num("n_std_errors", e.n_std_errors);
    num("tol", e.tol);
    count("n_bins", e.n_bins);
    count("n_windows", e.n_windows);
    count("dims", e.dims);
    num("tv_threshold", e.tv_threshold);
    num("floor", e.floor);
    if (j.contains("seed_b")) e.seed_b = unsigned_int(j["seed_b"], "experiment.seed_b");
    num("plateau_lo", e.plateau_lo);
    num("plateau_hi", e.plateau_hi);
    num("tail_factor", e.tail_factor);
    if (j.contains("axis1")) e.axis1 = axis_from_json(j["axis1"], "experiment.axis1");
    if (j.contains("axis2")) e.axis2 = axis_from_json(j["axis2"], "experiment.axis2");
    return e;
}

OutputConfig output_from_json(const json& j) {
    reject_unknown(j, "output", {"out_dir", "formats"});
    OutputConfig o;
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw ConfigError("'output.out_dir' must be a string");
        o.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("formats")) {
        if (!j["formats"].is_array()) throw ConfigError("'output.formats' must be an array");
        o.formats.clear();
        for (const auto& f : j["formats"]) {
            if (!f.is_string()) throw ConfigError("'output.formats' entries must be strings");
            o.formats.push_back(f.get<std::string>());
        }
    }
    for (const auto& f : o.formats) {
        if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown format '" + f + "'");
    }
    return o;
}

}  // namespace

bool OutputConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

FunctionalResponse response_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("response needs a string 'kind'");
    }
    const auto kind = j["kind"].get<std::string>();
    auto param = [&](const char* key) {
        if (!j.contains(key)) throw ConfigError("response " + kind + " needs '" + key + "'");
        return number(j[key], kind + "." + key);
    };
    if (kind == "Constant") {
        reject_unknown(j, "responses.Constant", {"kind", "a"});
        return FunctionalResponse::constant(param("a"));
    }
    if (kind == "HollingII") {
        reject_unknown(j, "responses.HollingII", {"kind", "a", "h"});
        return FunctionalResponse::holling2(param("a"), param("h"));
    }
    if (kind == "BeddingtonDeAngelis") {
        reject_unknown(j, "responses.BeddingtonDeAngelis", {"kind", "a", "h", "k"});
        return FunctionalResponse::beddington(param("a"), param("h"), param("k"));
    }
    throw ConfigError("unknown response kind '" + kind + "'");
}

json to_json(const FunctionalResponse& f) {
    json j;
    j["kind"] = f.kind_name();
    for (const char* key : {"a", "h", "k"}) {
        try {
            j[key] = f.parameter(key);
        } catch (const PreconditionError&) {
        }
    }
    return j;
}

RunConfig parse_config(const json& j) {
    reject_unknown(j, "<root>", {"model", "responses", "sim", "experiment", "output"});
    RunConfig c;
    if (!j.contains("model")) throw ConfigError("missing section 'model'");
    c.model.params = params_from_json(j["model"]);
    if (!j.contains("responses")) throw ConfigError("missing section 'responses'");
    reject_unknown(j["responses"], "responses", {"f1", "f2"});
    if (!j["responses"].contains("f1") || !j["responses"].contains("f2")) {
        throw ConfigError("'responses' needs both f1 and f2");
    }
    c.model.f1 = response_from_json(j["responses"]["f1"]);
    c.model.f2 = response_from_json(j["responses"]["f2"]);
    c.sim = sim_from_json(j.value("sim", json::object()), c.burn_in_explicit);
    c.experiment = experiment_from_json(j.value("experiment", json::object()));
    c.output = output_from_json(j.value("output", json::object()));
    try {
        c.sim.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("sim: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    const auto& p = c.model.params;
    json j;
    j["model"] = {{"lambda_input", p.lambda_input}, {"alpha1", p.alpha1}, {"alpha2", p.alpha2},
                  {"alpha3", p.alpha3},             {"alpha4", p.alpha4}, {"alpha5", p.alpha5},
                  {"sigma1", p.sigma1},             {"sigma2", p.sigma2}, {"sigma3", p.sigma3}};
    j["responses"] = {{"f1", to_json(c.model.f1)}, {"f2", to_json(c.model.f2)}};
    j["sim"] = {{"dt", c.sim.dt},
                {"t_end", c.sim.t_end},
                {"burn_in", c.sim.burn_in},
                {"subsample_every", c.sim.subsample_every},
                {"seed", c.sim.seed},
                {"n_paths", c.sim.n_paths},
                {"scheme", to_string(c.sim.scheme)}};
    json e = json::object();
    const auto& x = c.experiment;
    if (x.init) e["init"] = state_to_json(*x.init);
    if (x.init_b) e["init_b"] = state_to_json(*x.init_b);
    if (x.window) e["window"] = {x.window->first, x.window->second};
    auto put = [&](const char* key, const auto& opt) {
        if (opt) e[key] = *opt;
    };
    put("q", x.q);
    put("theta", x.theta);
    put("target_shift", x.target_shift);
    put("abs_tol", x.abs_tol);
    put("n_std_errors", x.n_std_errors);
    put("tol", x.tol);
    put("n_bins", x.n_bins);
    put("n_windows", x.n_windows);
    put("dims", x.dims);
    put("tv_threshold", x.tv_threshold);
    put("floor", x.floor);
    put("seed_b", x.seed_b);
    put("plateau_lo", x.plateau_lo);
    put("plateau_hi", x.plateau_hi);
    put("tail_factor", x.tail_factor);
    if (x.axis1) e["axis1"] = {{"param", x.axis1->param}, {"values", x.axis1->values}};
    if (x.axis2) e["axis2"] = {{"param", x.axis2->param}, {"values", x.axis2->values}};
    j["experiment"] = e;
    j["output"] = {{"out_dir", c.output.out_dir}, {"formats", c.output.formats}};
    return j;
}

Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("axis must look like name=lo:hi:count or name=v1,v2,...");
    }
    Axis a;
    a.param = text.substr(0, eq);
    const std::string rhs = text.substr(eq + 1);
    auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || !std::isfinite(v)) {
            throw ConfigError("bad number '" + s + "' in axis '" + text + "'");
        }
        return v;
    };
    if (rhs.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(rhs);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError("range axis needs lo:hi:count");
        const double lo = to_double(parts[0]);
        const double hi = to_double(parts[1]);
        const double n = to_double(parts[2]);
        if (n < 1 || n != std::floor(n)) throw ConfigError("axis count must be a positive integer");
        const auto count = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < count; ++i) {
            a.values.push_back(count == 1 ? lo
                                          : lo + (hi - lo) * static_cast<double>(i) /
                                                     static_cast<double>(count - 1));
        }
    } else {
        std::stringstream ss(rhs);
        for (std::string part; std::getline(ss, part, ',');) a.values.push_back(to_double(part));
    }
    if (a.values.empty()) throw ConfigError("axis '" + text + "' has no values");
    return a;
}

std::vector<std::string> split_formats(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string part; std::getline(ss, part, ',');) {
        if (part != "csv" && part != "json" && part != "svg") {
            throw ConfigError("unknown format '" + part + "'");
        }
        out.push_back(part);
    }
    return out;
}

}  // namespace npz::cli
