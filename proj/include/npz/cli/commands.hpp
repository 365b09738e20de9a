#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace npz::cli {

enum ExitCode : int { kExitPass = 0, kExitClaimFailed = 1, kExitUsage = 2 };

struct CliOptions {
    std::string command;  // validate | simulate | classify | regime-map | diagnose
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> formats;
    std::optional<double> tol;
    std::optional<std::size_t> paths;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::string> axis1;
    std::optional<std::string> axis2;
    std::optional<std::string> check;  // extinction | moments | negmoment | convergence
};

// Reports go to out, diagnostics and errors to err. Returns an ExitCode.
int run_command(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace npz::cli
