#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weak-coupling master equations: TCL2 generators and rotating-wave variants"};
    app.require_subcommand(1);
    std::string config, out = "out";
    int threads = 1;
    long seed = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"spectra", "noise characteristic and A(w) tables for the configured bath"},
        {"tls", "two-level system scenario"},
        {"qbm", "oscillator (quantum Brownian motion) scenario"},
        {"composite", "two coupled subsystems with independent baths"},
        {"eigen", "compare variants: paired eigenvalue gaps and steady-state distances"},
        {"sweep", "run the scenario over a parameter grid"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "scenario YAML file")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "reserved; all computations are deterministic");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : rwa::cli::kValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const int code = rwa::cli::run_command(command, config, out, threads);
    std::fprintf(code == 0 ? stdout : stderr, "%s: exit %d, report in %s/report.txt\n", command.c_str(), code,
                 out.c_str());
    return code;
}
