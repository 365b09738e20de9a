#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "npz/sde.hpp"
#include "npz/thresholds.hpp"

namespace npz::cli {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes to a sibling temp file and renames it over the target.
void write_atomic(const std::filesystem::path& target, const std::string& contents);

// Header t,x,y,z; one row per recorded step.
std::string trajectory_csv(const Trajectory& tr);

// Header axis1,axis2,lambda1,lambda2,regime; lambda2 empty when undefined.
std::string regime_map_csv(const RegimeMap& map);

struct Series {
    std::string label;
    std::string color;
    std::vector<double> values;
};

std::string svg_line_plot(const std::string& title, const std::vector<double>& t,
                          const std::vector<Series>& series);

std::string svg_regime_heatmap(const RegimeMap& map);

}  // namespace npz::cli
