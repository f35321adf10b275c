#include "leolora/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using leolora::cli::Options;

    CLI::App app{"Direct-to-satellite LoRaWAN simulator"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", opts.scenario_path, "Scenario file")->check(CLI::ExistingFile);
        cmd->add_option("--set", opts.overrides, "Override a key, e.g. network.n_devices=200");
        cmd->add_option("--seed", opts.seed, "Master seed (run) or base seed (sweep)");
    };

    auto* run = app.add_subcommand("run", "Execute one simulation run");
    add_common(run);
    run->add_option("--out", opts.out_path, "CSV output path (default stdout)");
    run->add_option("--trace", opts.trace_path, "Write a line-delimited event trace");
    run->add_flag("--print-config", opts.print_config, "Print the resolved configuration and exit");

    auto* sweep = app.add_subcommand("sweep", "Run the size x time x scheme cross-product");
    add_common(sweep);
    sweep->add_option("--out", opts.out_path, "CSV output path (default stdout)");
    sweep->add_option("--parallel", opts.parallel, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--print-config", opts.print_config, "Print the resolved configuration and exit");

    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle and invariant checks");
    add_common(selftest);
    selftest->add_option("--inject-fault", opts.inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? leolora::cli::kOk : leolora::cli::kValidationError;
    }

    if (*run) {
        return leolora::cli::cmd_run(opts, std::cout, std::cerr);
    }
    if (*sweep) {
        return leolora::cli::cmd_sweep(opts, std::cout, std::cerr);
    }
    return leolora::cli::cmd_selftest(opts, std::cout, std::cerr);
}
