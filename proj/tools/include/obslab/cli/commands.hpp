#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obslab/simkit.hpp"

namespace obslab::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,  // unexpected error
    exit_config = 2,
    exit_numerical = 3,
};

/// Either a config file or a preset name; exactly one must be set.
struct ScenarioSource {
    std::optional<std::string> config;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
};

/// Throws ConfigError.
simkit::Scenario resolve_scenario(const ScenarioSource& src, std::ostream& log);

struct SimulateOptions {
    ScenarioSource source;
    std::string output_dir = "out";
};

struct FreqrespOptions {
    ScenarioSource source;
    std::size_t channel = 2;
    double w_min = 1e-1;
    double w_max = 1e5;
    std::size_t points = 200;
    std::string output = "freqresp.csv";
};

struct SweepOptions {
    ScenarioSource source;
    std::string param = "epsilon";
    std::vector<double> values;
    std::string output_dir = "sweep";
    std::optional<std::size_t> threads;
};

struct CompareOptions {
    std::vector<std::string> presets{"fig3", "fig4", "fig5"};
    std::string output_dir = "compare";
    std::optional<std::size_t> threads;
};

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_freqresp(const FreqrespOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err);

/// Maps the active exception to an exit code and prints it; call from a
/// catch block.
int report_exception(std::ostream& err);

/// --threads, else OBSLAB_THREADS, else hardware concurrency; never 0.
std::size_t worker_count(std::optional<std::size_t> requested);

/// Applies `param` (alias such as "epsilon" or "section.key") to a scenario
/// by editing its full TOML form. Throws ConfigError if the key does not
/// exist or the edited scenario is invalid.
simkit::Scenario apply_parameter(const simkit::Scenario& base, const std::string& param, double value);

}  // namespace obslab::cli
