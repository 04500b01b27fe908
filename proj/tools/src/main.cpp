// main.cpp — rabiqpt command-line entry point

#include "rabiqpt/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"rabiqpt: quench simulation and Wigner tomography of a driven qubit-resonator system"};
    app.require_subcommand(1);

    rabiqpt::cli::Invocation inv;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;

    const char* verbs[][2] = {
        {"quench", "Run the xi quench and write nbar, populations and parity"},
        {"tomography", "Simulate Wigner tomography and reconstruct density matrices"},
        {"calibrate", "Scan phi2 on the synthetic calibration experiment"},
        {"validate-config", "Parse, validate and print the canonical config"},
    };
    for (const auto& v : verbs) {
        CLI::App* sub = app.add_subcommand(v[0], v[1]);
        sub->add_option("--config", inv.config_path, "Config file (TOML subset, MHz and us units)")->required();
        sub->add_option("--out", out_dir, "Output directory (overrides [run] output_dir)");
        sub->add_option("--threads", threads, "Worker threads (overrides [run] threads)");
        sub->add_option("--seed", seed, "Noise seed (overrides [run] seed)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rabiqpt::cli::kExitConfig;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--out")) inv.out_dir = out_dir;
    if (chosen->count("--threads")) inv.threads = threads;
    if (chosen->count("--seed")) inv.seed = seed;
    return rabiqpt::cli::run_command(chosen->get_name(), inv, std::cout, std::cerr);
}
