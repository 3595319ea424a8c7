#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "swimsim/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Segmented swimmer in a nonstationary Stokes fluid"};
    app.require_subcommand(1);

    std::string config;
    auto* run = app.add_subcommand("run", "time-march a scenario");
    run->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);

    auto* picard = app.add_subcommand("picard", "fixed-point iteration over a window, compared with time marching");
    picard->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);

    int cells = 16;
    bool space_only = false;
    auto* mms = app.add_subcommand("validate-mms", "manufactured-solution convergence study (N^3 and (2N)^3)");
    mms->add_option("--cells", cells, "coarse cells per axis")->check(CLI::Range(8, 512));
    mms->add_flag("--space-only", space_only, "skip the time refinement study");

    auto* tstar = app.add_subcommand("estimate-tstar", "evaluate the existence and uniqueness horizons");
    tstar->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);

    std::string experiment;
    auto* exp = app.add_subcommand("experiment", "contraction | lipschitz | force-bound | uniqueness");
    exp->add_option("name", experiment, "experiment name")
        ->required()
        ->check(CLI::IsMember({"contraction", "lipschitz", "force-bound", "uniqueness"}));
    exp->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);

    std::string results;
    int threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run the cartesian product of the config's sweep section");
    sweep->add_option("config", config, "scenario JSON with a sweep section")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", results, "results CSV (default: <output.directory>/sweep_results.csv)");
    sweep->add_option("--threads", threads, "worker threads (default: SWIMSIM_THREADS or all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : swimsim::kExitError;
    }

    if (*run) return swimsim::cmd_run(config, std::cout, std::cerr);
    if (*picard) return swimsim::cmd_picard(config, std::cout, std::cerr);
    if (*mms) return swimsim::cmd_validate_mms(cells, !space_only, std::cout, std::cerr);
    if (*tstar) return swimsim::cmd_estimate_tstar(config, std::cout, std::cerr);
    if (*exp) return swimsim::cmd_experiment(experiment, config, std::cout, std::cerr);
    if (*sweep) return swimsim::cmd_sweep(config, results, threads, std::cout, std::cerr);
    return swimsim::kExitError;
}
