#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npz/model.hpp"
#include "npz/sde.hpp"
#include "npz/thresholds.hpp"

namespace npz::cli {

// Command-specific knobs. Every key is optional; commands pick their defaults.
struct ExperimentConfig {
    std::optional<State> init;
    std::optional<State> init_b;
    std::optional<double> q;
    std::optional<double> theta;
    std::optional<std::pair<double, double>> window;
    std::optional<double> target_shift;
    std::optional<double> abs_tol;
    std::optional<double> n_std_errors;
    std::optional<double> tol;
    std::optional<std::size_t> n_bins;
    std::optional<std::size_t> n_windows;
    std::optional<std::size_t> dims;
    std::optional<double> tv_threshold;
    std::optional<double> floor;
    std::optional<std::uint64_t> seed_b;
    std::optional<double> plateau_lo;
    std::optional<double> plateau_hi;
    std::optional<double> tail_factor;
    std::optional<Axis> axis1;
    std::optional<Axis> axis2;
};

struct OutputConfig {
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};

    bool wants(const std::string& fmt) const;
};

struct RunConfig {
    Model model;
    SimConfig sim;
    bool burn_in_explicit = false;
    ExperimentConfig experiment;
    OutputConfig output;
};

inline constexpr const char* kOutDirEnv = "NPZ_OUT_DIR";

// Throws ConfigError on malformed input, unknown keys, or values outside the
// module invariants that can be checked without running the model.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const FunctionalResponse& f);
FunctionalResponse response_from_json(const nlohmann::json& j);

// "name=lo:hi:count" (inclusive linspace) or "name=v1,v2,...".
Axis parse_axis(const std::string& text);

std::vector<std::string> split_formats(const std::string& list);

}  // namespace npz::cli
