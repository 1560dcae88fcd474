#include "obslab/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <thread>

#include "obslab/cli/csv.hpp"
#include "obslab/cli/metrics.hpp"
#include "obslab/cli/plots.hpp"
#include "obslab/cli/presets.hpp"
#include "obslab/cli/scenario_file.hpp"
#include "obslab/errors.hpp"

namespace obslab::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("error writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory '" + dir.string() + "': " + ec.message());
}

/// Runs `count` independent jobs on at most `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
}

enum class RunStatus { ok, rejected, failed };

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::rejected: return "rejected";
        case RunStatus::failed: return "failed";
    }
    return "?";
}

struct RunResult {
    RunStatus status = RunStatus::failed;
    std::string message;
    std::optional<simkit::Scenario> scenario;
    SimTrace trace;
    MetricsReport metrics;
    double runtime = 0.0;
};

/// Never throws; failures are recorded in the result.
RunResult execute(const std::function<simkit::Scenario()>& make) {
    RunResult r;
    try {
        r.scenario = make();
    } catch (const std::exception& e) {
        r.status = RunStatus::rejected;
        r.message = e.what();
        return r;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.trace = simkit::run_closed_loop(*r.scenario);
        r.metrics = compute_metrics(r.trace, 2.0, r.scenario->controller.gains);
        r.status = RunStatus::ok;
    } catch (const std::invalid_argument& e) {
        r.status = RunStatus::rejected;
        r.message = e.what();
    } catch (const BudgetExceededError& e) {
        r.status = RunStatus::rejected;
        r.message = e.what();
    } catch (const std::exception& e) {
        r.status = RunStatus::failed;
        r.message = e.what();
    }
    r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void write_run(const fs::path& dir, const RunResult& r) {
    make_dir(dir);
    write_text(dir / "scenario.toml", to_toml(*r.scenario));
    if (r.status != RunStatus::ok) return;
    write_trace_csv((dir / "trace.csv").string(), r.trace, r.scenario->name);
    const auto setup = simkit::prepare(*r.scenario);
    write_text(dir / "metrics.json", metrics_json(r.metrics, *r.scenario, &setup));
    write_text(dir / "plot.gp", trace_plot_script(r.trace, "trace.csv", r.scenario->name));
}

/// 0 if any run succeeded, else 3 when a run failed numerically, else 2.
int batch_exit(const std::vector<RunResult>& results) {
    bool numerical = false;
    for (const auto& r : results) {
        if (r.status == RunStatus::ok) return exit_ok;
        numerical = numerical || r.status == RunStatus::failed;
    }
    return numerical ? exit_numerical : exit_config;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

struct ParamRef {
    std::string section;
    std::string key;
};

ParamRef resolve_param(const toml::Document& doc, const std::string& param) {
    static const std::pair<std::string_view, ParamRef> aliases[] = {
        {"epsilon", {"estimator", "epsilon"}}, {"step", {"sim", "step"}},         {"t_end", {"sim", "t_end"}},
        {"gamma", {"approximator", "gamma"}},  {"noise", {"noise", "amplitude"}}, {"seed", {"noise", "seed"}},
        {"u_limit", {"controller", "u_limit"}},
    };
    ParamRef ref;
    const auto dot = param.find('.');
    if (dot != std::string::npos) {
        ref = {param.substr(0, dot), param.substr(dot + 1)};
    } else {
        const auto* it = std::find_if(std::begin(aliases), std::end(aliases), [&](const auto& a) { return a.first == param; });
        if (it == std::end(aliases)) throw ConfigError("unknown sweep parameter '" + param + "'");
        ref = it->second;
    }
    const auto* table = doc.find(ref.section);
    const auto* entry = table ? table->find(ref.key) : nullptr;
    if (!entry || !entry->value.is_number()) {
        throw ConfigError("sweep parameter '" + param + "' (" + ref.section + "." + ref.key +
                          ") is not a numeric setting of this scenario");
    }
    return ref;
}

}  // namespace

std::size_t worker_count(std::optional<std::size_t> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("OBSLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

simkit::Scenario apply_parameter(const simkit::Scenario& base, const std::string& param, double value) {
    auto doc = to_document(base);
    const auto ref = resolve_param(doc, param);
    auto& v = doc.find(ref.section)->find(ref.key)->value;
    if (std::holds_alternative<std::int64_t>(v.data)) {
        if (!(value >= 0.0) || value != std::floor(value) || value > 9.2e18) {
            throw ConfigError(ref.section + "." + ref.key + " needs a non-negative integer, got " + format_double(value));
        }
        v.data = static_cast<std::int64_t>(value);
    } else {
        v.data = value;
    }
    return scenario_from_document(doc);
}

simkit::Scenario resolve_scenario(const ScenarioSource& src, std::ostream& log) {
    if (src.config.has_value() == src.preset.has_value()) {
        throw ConfigError("give exactly one of -c/--config or --preset");
    }
    auto s = src.config ? load_scenario_file(*src.config) : load_preset(*src.preset);
    if (src.seed) {
        if (s.noise) {
            s.noise->seed = *src.seed;
        } else {
            log << "note: scenario has no [noise] section, --seed ignored\n";
        }
    }
    return s;
}

int report_exception(std::ostream& err) {
    try {
        throw;
    } catch (const IntegrationDivergedError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const SingularSystemError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const BudgetExceededError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const auto s = resolve_scenario(opt.source, err);
        const auto setup = simkit::prepare(s);
        const auto t0 = std::chrono::steady_clock::now();
        const auto trace = simkit::run_closed_loop(s);
        const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto m = compute_metrics(trace, 2.0, s.controller.gains);

        const fs::path dir(opt.output_dir);
        make_dir(dir);
        write_trace_csv((dir / "trace.csv").string(), trace, s.name);
        write_text(dir / "metrics.json", metrics_json(m, s, &setup));
        write_text(dir / "plot.gp", trace_plot_script(trace, "trace.csv", s.name));
        write_text(dir / "scenario.toml", to_toml(s));

        out << s.name << ": " << trace.rows() << " samples in " << format_double(runtime) << " s\n"
            << "  max |e1| after " << m.settle_time << " s: " << format_double(m.max_abs_e1_after_settle) << '\n'
            << "  rms e1: " << format_double(m.rms_e1) << '\n'
            << "  fhat rms error / f rms: " << format_double(m.fhat_relative_error) << '\n';
        if (m.steady_z_norm) out << "  steady ||z||: " << format_double(*m.steady_z_norm) << '\n';
        out << "  wrote " << (dir / "trace.csv").string() << '\n';
        return exit_ok;
    } catch (...) {
        return report_exception(err);
    }
}

int cmd_freqresp(const FreqrespOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const auto s = resolve_scenario(opt.source, err);
        if (!s.estimator) throw ConfigError("freqresp needs an [estimator] section");
        if (!(opt.w_min > 0.0) || !(opt.w_max > opt.w_min) || !std::isfinite(opt.w_max)) {
            throw ConfigError("frequency range must satisfy 0 < wmin < wmax");
        }
        if (opt.points < 2) throw ConfigError("--points must be at least 2");
        const estimators::EstimatorGains g(s.initial_state.size(), s.estimator->epsilon, s.estimator->gains);
        if (opt.channel < 1 || opt.channel > g.order() + 1) {
            throw ConfigError("--channel must lie in 1.." + std::to_string(g.order() + 1));
        }
        const auto hg = estimators::high_gain_state_space(g);

        std::ofstream csv(opt.output, std::ios::binary);
        if (!csv) throw ConfigError("cannot write '" + opt.output + "'");
        csv << "# obslab frequency response, channel " << opt.channel << ", columns: omega mag_ic phase_ic mag_hg phase_hg\n"
            << "omega,mag_ic,phase_ic,mag_hg,phase_hg\n";
        const double lo = std::log10(opt.w_min);
        const double hi = std::log10(opt.w_max);
        for (std::size_t k = 0; k < opt.points; ++k) {
            const double w = std::pow(10.0, lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(opt.points - 1));
            const auto ic = estimators::freq_response(g, opt.channel, w);
            const auto h = numkit::observer_noise_tf(hg.a, hg.l, opt.channel, w);
            csv << format_double(w) << ',' << format_double(std::abs(ic)) << ',' << format_double(std::arg(ic)) << ','
                << format_double(std::abs(h)) << ',' << format_double(std::arg(h)) << '\n';
        }
        if (!csv) throw ConfigError("error writing '" + opt.output + "'");
        const fs::path script = fs::path(opt.output).replace_extension(".gp");
        write_text(script, freqresp_plot_script(fs::path(opt.output).filename().string(), opt.channel));
        out << "wrote " << opt.output << " (" << opt.points << " points)\n";
        return exit_ok;
    } catch (...) {
        return report_exception(err);
    }
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (opt.values.empty()) throw ConfigError("--values needs at least one value");
        const auto base = resolve_scenario(opt.source, err);
        resolve_param(to_document(base), opt.param);

        std::vector<RunResult> results(opt.values.size());
        parallel_for(results.size(), worker_count(opt.threads), [&](std::size_t i) {
            results[i] = execute([&] {
                auto s = apply_parameter(base, opt.param, opt.values[i]);
                char suffix[32];
                std::snprintf(suffix, sizeof suffix, "-%03zu", i);
                s.name = base.name + suffix;
                return s;
            });
        });

        const fs::path dir(opt.output_dir);
        make_dir(dir);
        std::ofstream csv(dir / "summary.csv", std::ios::binary);
        if (!csv) throw ConfigError("cannot write '" + (dir / "summary.csv").string() + "'");
        csv << "# obslab sweep of " << opt.param << " on " << base.name
            << ", columns: value status steady_z_norm rms_e1 max_abs_e1 runtime_s message\n"
            << "value,status,steady_z_norm,rms_e1,max_abs_e1,runtime_s,message\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            char name[32];
            std::snprintf(name, sizeof name, "run_%03zu", i);
            if (r.scenario) write_run(dir / name, r);
            csv << format_double(opt.values[i]) << ',' << to_string(r.status) << ',';
            if (r.status == RunStatus::ok) {
                csv << optional_field(r.metrics.steady_z_norm) << ',' << format_double(r.metrics.rms_e1) << ','
                    << format_double(r.metrics.max_abs_e1_after_settle) << ',' << format_double(r.runtime) << ',';
            } else {
                csv << ",,,,";
            }
            csv << csv_field(r.message) << '\n';
            out << opt.param << " = " << format_double(opt.values[i]) << ": " << to_string(r.status);
            if (!r.message.empty()) out << " (" << r.message << ")";
            out << '\n';
        }
        out << "wrote " << (dir / "summary.csv").string() << '\n';
        return batch_exit(results);
    } catch (...) {
        return report_exception(err);
    }
}

int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (opt.presets.empty()) throw ConfigError("--presets needs at least one name");
        std::vector<simkit::Scenario> scenarios;
        for (const auto& p : opt.presets) scenarios.push_back(load_preset(p));

        std::vector<RunResult> results(scenarios.size());
        parallel_for(results.size(), worker_count(opt.threads),
                     [&](std::size_t i) { results[i] = execute([&] { return scenarios[i]; }); });

        const fs::path dir(opt.output_dir);
        make_dir(dir);
        std::ofstream csv(dir / "compare.csv", std::ios::binary);
        if (!csv) throw ConfigError("cannot write '" + (dir / "compare.csv").string() + "'");
        csv << "# obslab comparison, columns: preset status rms_e1 max_abs_e1_after_settle fhat_relative_error "
               "saturation_duty steady_z_norm xhat2_jitter velocity_estimate message\n"
            << "preset,status,rms_e1,max_abs_e1_after_settle,fhat_relative_error,saturation_duty,steady_z_norm,"
               "xhat2_jitter,velocity_estimate,message\n";
        std::vector<std::pair<std::string, std::string>> plotted;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            write_run(dir / opt.presets[i], r);
            csv << csv_field(opt.presets[i]) << ',' << to_string(r.status) << ',';
            if (r.status == RunStatus::ok) {
                const auto& m = r.metrics;
                csv << format_double(m.rms_e1) << ',' << format_double(m.max_abs_e1_after_settle) << ','
                    << format_double(m.fhat_relative_error) << ',' << format_double(m.saturation_duty) << ','
                    << optional_field(m.steady_z_norm) << ',' << optional_field(m.xhat2_jitter) << ','
                    << (r.trace.has("xhat2") ? 1 : 0) << ',';
                plotted.emplace_back(opt.presets[i], opt.presets[i] + "/trace.csv");
            } else {
                csv << ",,,,,,,";
            }
            csv << csv_field(r.message) << '\n';
            out << opt.presets[i] << ": " << to_string(r.status);
            if (r.status == RunStatus::ok) out << ", max |e1| after settling " << format_double(r.metrics.max_abs_e1_after_settle);
            if (!r.message.empty()) out << " (" << r.message << ")";
            out << '\n';
        }
        if (!plotted.empty()) write_text(dir / "compare.gp", compare_plot_script(plotted));
        out << "wrote " << (dir / "compare.csv").string() << '\n';
        return batch_exit(results);
    } catch (...) {
        return report_exception(err);
    }
}

}  // namespace obslab::cli
