#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rwa/liouvillian.hpp"

namespace rwa::cli {

struct SystemConfig {
    std::string type = "two_level"; // two_level | oscillator | composite
    double omega = 1.0;
    double mass = 1.0;
    int n_fock = 12;
    std::vector<SystemConfig> parts; // composite: exactly two
    double coupling = 0.0;           // composite: g x_A x_B
    bool operator==(const SystemConfig&) const = default;
};

struct BathConfig {
    double gamma0 = 0.0;
    double cutoff = 100.0;
    std::string regulator = "lorentz_drude";
    double temperature = 0.0;
    bool operator==(const BathConfig&) const = default;
};

struct TimesConfig {
    double t_max = 10.0;
    int steps = 10;
    bool operator==(const TimesConfig&) const = default;
};

struct GridConfig {
    double min = -3.0;
    double max = 3.0;
    int points = 61;
    bool operator==(const GridConfig&) const = default;
};

struct SweepConfig {
    std::string parameter; // gamma0 | cutoff | temperature | omega | coupling
    std::vector<double> values;
    bool operator==(const SweepConfig&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    SystemConfig system;
    BathConfig bath;
    std::vector<std::string> variants{"full"};
    std::vector<std::string> outputs;
    TimesConfig times;
    GridConfig grid;
    std::vector<double> cutoffs{1e2, 1e3, 1e4}; // in units of omega
    int initial_level = 1;
    std::optional<SweepConfig> sweep;
    bool operator==(const Scenario&) const = default;
};

inline const std::vector<std::string> kVariants{"full", "post_rwa", "pre_rwa", "naive_composite"};
inline const std::vector<std::string> kOutputs{"spectra",    "generators", "eigenvalues",  "steady_state",
                                               "trajectory", "covariance", "cutoff_sweep", "composite_gap",
                                               "perturbation"};
inline const std::vector<std::string> kCommands{"spectra", "tls", "qbm", "composite", "eigen", "sweep"};

// Throws ValidationError (with line:column for YAML problems).
Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_yaml(const Scenario& s);

void validate(const Scenario& s, const std::string& command);

struct GapRow {
    std::string a, b;
    double eigenvalue_gap = 0.0;
    double steady_state_distance = 0.0;
};
// Requires at least two variants.
std::vector<GapRow> compare_variants(const Scenario& s);

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3 };

// Writes the CSV artifacts plus report.txt into out_dir and returns the exit code.
int run_command(const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out_dir,
                int threads = 1);
int run_scenario(const std::string& command, const Scenario& s, const std::filesystem::path& out_dir,
                 int threads = 1);

} // namespace rwa::cli
