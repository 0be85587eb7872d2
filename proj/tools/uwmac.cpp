#include "uwmac/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    namespace cli = uwmac::cli;

    CLI::App app{"Slotted MAC coexistence simulator for underwater acoustic networks"};
    app.require_subcommand(1);

    cli::RunOptions run_opts;
    auto *run = app.add_subcommand("run", "Simulate a scenario and compare against the closed-form optimum");
    run->add_option("--scenario", run_opts.scenario, "Scenario JSON file")->required();
    run->add_option("--slots", run_opts.slots, "Measured AP slots (overrides horizon)");
    run->add_option("--warmup", run_opts.warmup, "Warm-up AP slots excluded from metrics");
    run->add_option("--seed", run_opts.seed, "Root seed");
    run->add_option("--out", run_opts.out, "Write a CSV row here");
    run->add_option("--tolerance", run_opts.tolerance, "Absolute tolerance (default 4 sqrt(T(1-T)/n) + 1e-9)");

    cli::SweepOptions sweep_opts;
    auto *sweep = app.add_subcommand("sweep", "Run a parameter grid and emit one CSV row per point");
    sweep->add_option("--scenario", sweep_opts.scenario, "Base scenario JSON file")->required();
    sweep->add_option("--sweep", sweep_opts.grid, "Grid axis name=v1,v2,... (repeatable)");
    sweep->add_option("--slots", sweep_opts.slots, "Measured AP slots (overrides horizon)");
    sweep->add_option("--warmup", sweep_opts.warmup, "Warm-up AP slots");
    sweep->add_option("--seed", sweep_opts.seed, "Base seed");
    sweep->add_option("--out", sweep_opts.out, "CSV output path (default stdout)");
    sweep->add_option("--tolerance", sweep_opts.tolerance, "Absolute tolerance");

    cli::VerifyOptions verify_opts;
    auto *verify = app.add_subcommand("verify", "Brute-force certificate of the model-aware policy");
    verify->add_option("--scenario", verify_opts.scenario, "Scenario JSON file")->required();
    verify->add_option("--horizon", verify_opts.horizon, "Enumerated window length (<= 16)");
    verify->add_option("--warmup", verify_opts.warmup, "Warm-up AP slots");
    verify->add_flag("--corrupt-policy", verify_opts.corrupt_policy, "Flip the first policy decision (negative control)")
        ->group("");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_input_error;
    }

    if (*run)
        return cli::cmd_run(run_opts, std::cout, std::cerr);
    if (*sweep)
        return cli::cmd_sweep(sweep_opts, std::cout, std::cerr);
    return cli::cmd_verify(verify_opts, std::cout, std::cerr);
}
