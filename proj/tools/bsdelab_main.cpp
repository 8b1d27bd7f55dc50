#include <CLI11.hpp>

#include "bsde/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bsdelab - numerical laboratory for BSDEs with pathwise-stochastic coefficients"};
    app.require_subcommand(1);

    bsde::CliOptions options;
    std::uint64_t seed = 0;
    std::size_t paths = 0, steps = 0;
    unsigned workers = 0;

    const std::vector<std::string> commands{"solve",  "audit",     "compare", "minimal",
                                            "unique", "partition", "gn"};
    const std::vector<std::string> descriptions{
        "solve one problem and emit Y/Z summaries plus Picard diagnostics",
        "run assumption and a-priori-estimate audits",
        "comparison experiment between two problems on one lattice",
        "monotone approximation scheme toward the minimal (or maximal) solution",
        "uniqueness probe across initial guesses and partition counts",
        "dump the stopping-time partition",
        "tabulate the Lipschitz regularization over a value grid"};

    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i], descriptions[i]);
        sub->add_option("--config", options.config_path, "experiment config file")->required();
        sub->add_option("--out", options.out_dir, "output directory (default: out)");
        sub->add_option("--seed", seed, "override lattice.seed");
        sub->add_option("--paths", paths, "override lattice.paths");
        sub->add_option("--steps", steps, "override lattice.steps");
        sub->add_option("--workers", workers, "override solver.workers");
        sub->add_flag("--verbose", options.verbose, "verbose progress output");
        sub->callback([&, i] {
            options.command = commands[i];
            if (seed != 0) options.seed_override = seed;
            if (paths != 0) options.paths_override = paths;
            if (steps != 0) options.steps_override = steps;
            if (workers != 0) options.workers_override = workers;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : bsde::kExitConfigError;
    }
    return bsde::run_cli(options);
}
