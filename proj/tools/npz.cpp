#include <iostream>

#include <CLI11.hpp>

#include "npz/cli/commands.hpp"

int main(int argc, char** argv) {
    using npz::cli::CliOptions;
    CLI::App app{"npz: stochastic nutrient-phytoplankton-zooplankton toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Run configuration (JSON)")->required();
        sub->add_option("--seed", opts.seed, "Root seed (overrides sim.seed)");
        sub->add_option("--out-dir", opts.out_dir, "Output directory");
        sub->add_option("--format", opts.formats, "Comma-separated subset of csv,json,svg");
        sub->add_option("--tol", opts.tol, "Classification tolerance band");
        sub->add_option("--paths", opts.paths, "Ensemble size (overrides sim.n_paths)");
        sub->add_option("--t-end", opts.t_end, "Horizon (overrides sim.t_end)");
        sub->add_option("--dt", opts.dt, "Step size (overrides sim.dt)");
    };

    auto* validate = app.add_subcommand("validate", "Check model assumptions");
    auto* simulate = app.add_subcommand("simulate", "Integrate one path and write trajectory.csv");
    auto* classify = app.add_subcommand("classify", "Compute invasion rates and the regime");
    auto* regime = app.add_subcommand("regime-map", "Classify a two-parameter grid");
    auto* diagnose = app.add_subcommand("diagnose", "Empirically check an asymptotic claim");
    for (auto* sub : {validate, simulate, classify, regime, diagnose}) add_common(sub);
    regime->add_option("--axis1", opts.axis1, "name=lo:hi:count or name=v1,v2,...");
    regime->add_option("--axis2", opts.axis2, "name=lo:hi:count or name=v1,v2,...");
    diagnose->add_option("--check", opts.check, "extinction|moments|negmoment|convergence")
        ->required()
        ->check(CLI::IsMember({"extinction", "moments", "negmoment", "convergence"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return npz::cli::kExitUsage;
    }
    opts.command = app.get_subcommands().front()->get_name();
    return npz::cli::run_command(opts, std::cout, std::cerr);
}
