#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "obslab/cli/commands.hpp"
#include "obslab/cli/presets.hpp"

using namespace obslab::cli;

namespace {

void add_source(CLI::App* cmd, ScenarioSource& src) {
    auto* cfg = cmd->add_option("-c,--config", src.config, "scenario file (TOML)");
    auto* pre = cmd->add_option("--preset", src.preset, "built-in scenario instead of a file");
    cfg->excludes(pre);
    cmd->add_option("--seed", src.seed, "override the noise seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"obslab: output-feedback control experiments on the cart-pole pendulum"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "obslab 0.1.0");

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "run one scenario, write trace.csv, metrics.json and plot.gp");
    add_source(simulate, sim.source);
    simulate->add_option("-o,--output", sim.output_dir, "output directory")->capture_default_str();

    FreqrespOptions fr;
    auto* freqresp = app.add_subcommand("freqresp", "differentiator frequency response, integral chain vs high gain");
    add_source(freqresp, fr.source);
    freqresp->add_option("--channel", fr.channel, "estimate channel i (1..n+1)")->capture_default_str();
    freqresp->add_option("--wmin", fr.w_min, "lowest frequency [rad/s]")->capture_default_str();
    freqresp->add_option("--wmax", fr.w_max, "highest frequency [rad/s]")->capture_default_str();
    freqresp->add_option("--points", fr.points, "log-spaced grid size")->capture_default_str();
    freqresp->add_option("-o,--output", fr.output, "output CSV")->capture_default_str();

    SweepOptions sw;
    auto* sweep = app.add_subcommand("sweep", "run one scenario per parameter value");
    add_source(sweep, sw.source);
    sweep->add_option("--param", sw.param, "epsilon, step, t_end, gamma, noise, seed, u_limit or section.key")
        ->capture_default_str();
    sweep->add_option("--values", sw.values, "comma-separated values")->required()->delimiter(',');
    sweep->add_option("-o,--output", sw.output_dir, "output directory")->capture_default_str();
    sweep->add_option("--threads", sw.threads, "worker threads (default: OBSLAB_THREADS or all cores)");

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "run several presets side by side");
    compare->add_option("--presets", cmp.presets, "comma-separated preset names")->delimiter(',')->capture_default_str();
    compare->add_option("-o,--output", cmp.output_dir, "output directory")->capture_default_str();
    compare->add_option("--threads", cmp.threads, "worker threads");

    app.add_subcommand("presets", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    if (simulate->parsed()) return cmd_simulate(sim, std::cout, std::cerr);
    if (freqresp->parsed()) return cmd_freqresp(fr, std::cout, std::cerr);
    if (sweep->parsed()) return cmd_sweep(sw, std::cout, std::cerr);
    if (compare->parsed()) return cmd_compare(cmp, std::cout, std::cerr);
    for (auto name : preset_names()) std::cout << name << '\n';
    return exit_ok;
}
