#pragma once

#include <json.hpp>

#include "npz/diagnostics.hpp"
#include "npz/model.hpp"
#include "npz/sde.hpp"
#include "npz/thresholds.hpp"

namespace npz::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const ThresholdReport& r);
nlohmann::json to_json(const RegimeMap& m);
nlohmann::json to_json(const ExtinctionReport& r);
nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const NegativeMomentReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json run_meta(const Trajectory& tr);

// Canonical text form: two-space indent and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace npz::cli
