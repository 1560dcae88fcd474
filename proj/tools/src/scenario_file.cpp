#include "obslab/cli/scenario_file.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "obslab/errors.hpp"

namespace obslab::cli {

namespace {

using simkit::ApproximatorKind;
using simkit::ControllerKind;
using simkit::ControlMemory;
using estimators::EstimatorKind;

[[noreturn]] void fail_at(const toml::Position& pos, const std::string& msg) {
    throw ConfigError(toml::describe(pos) + ": " + msg);
}

double as_number(const toml::Value& v, std::string_view key) {
    if (const auto* d = std::get_if<double>(&v.data)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
    fail_at(v.pos, "'" + std::string(key) + "' must be a number, got " + std::string(v.type_name()));
}

std::vector<double> as_vector(const toml::Value& v, std::string_view key) {
    const auto* arr = std::get_if<toml::Array>(&v.data);
    if (!arr) fail_at(v.pos, "'" + std::string(key) + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(arr->size());
    for (const auto& item : *arr) out.push_back(as_number(item, key));
    return out;
}

std::vector<std::vector<double>> as_matrix(const toml::Value& v, std::string_view key) {
    const auto* arr = std::get_if<toml::Array>(&v.data);
    if (!arr) fail_at(v.pos, "'" + std::string(key) + "' must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (const auto& row : *arr) out.push_back(as_vector(row, key));
    return out;
}

/// Reads one table, remembering which keys were consumed.
class Section {
public:
    Section(const toml::Table* table, std::string label, std::initializer_list<std::string_view> allowed)
        : table_(table), label_(std::move(label)), allowed_(allowed) {
        if (!table_) return;
        for (const auto& e : table_->entries) {
            if (std::find(allowed_.begin(), allowed_.end(), e.key) == allowed_.end()) {
                fail_at(e.pos, "unknown key '" + e.key + "' in " + label_);
            }
        }
    }

    [[nodiscard]] bool present() const { return table_ != nullptr; }

    [[nodiscard]] const toml::Value* get(std::string_view key) const {
        if (!table_) return nullptr;
        const auto* e = table_->find(key);
        return e ? &e->value : nullptr;
    }

    const toml::Value& require(std::string_view key) const {
        const auto* v = get(key);
        if (!v) fail_at(table_->pos, "missing required key '" + std::string(key) + "' in " + label_);
        return *v;
    }

    void number(std::string_view key, double& out) const {
        if (const auto* v = get(key)) out = as_number(*v, key);
    }

    void vector(std::string_view key, std::vector<double>& out) const {
        if (const auto* v = get(key)) out = as_vector(*v, key);
    }

    std::string text(std::string_view key) const {
        const auto& v = require(key);
        const auto* s = std::get_if<std::string>(&v.data);
        if (!s) fail_at(v.pos, "'" + std::string(key) + "' must be a string");
        return *s;
    }

    std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) const {
        const auto* v = get(key);
        if (!v) return fallback;
        const auto* i = std::get_if<std::int64_t>(&v->data);
        if (!i || *i < 0) fail_at(v->pos, "'" + std::string(key) + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(*i);
    }

    [[nodiscard]] std::size_t size() const { return table_ ? table_->entries.size() : 0; }

private:
    const toml::Table* table_;
    std::string label_;
    std::vector<std::string_view> allowed_;
};

template <typename Enum>
Enum parse_enum(const Section& sec, std::string_view key, std::initializer_list<Enum> values) {
    const std::string name = sec.text(key);
    for (Enum e : values) {
        if (to_string(e) == name) return e;
    }
    std::string options;
    for (Enum e : values) options += (options.empty() ? "" : ", ") + std::string(to_string(e));
    fail_at(sec.require(key).pos, "unknown " + std::string(key) + " '" + name + "' (expected one of " + options + ")");
}

toml::Value num(double v) { return toml::Value{v, {}}; }
toml::Value str(std::string_view v) { return toml::Value{std::string(v), {}}; }
toml::Value integer(std::int64_t v) { return toml::Value{v, {}}; }

toml::Value vec(std::span<const double> v) {
    toml::Array arr;
    for (double x : v) arr.push_back(num(x));
    return toml::Value{std::move(arr), {}};
}

void put(toml::Table& t, std::string key, toml::Value v) { t.entries.push_back(toml::Entry{std::move(key), std::move(v), {}}); }

}  // namespace

std::string_view to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::open_loop: return "open_loop";
        case ControllerKind::full_state: return "full_state";
        case ControllerKind::adaptive: return "adaptive";
        case ControllerKind::differentiator: return "differentiator";
        case ControllerKind::observer: return "observer";
    }
    return "?";
}

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::integral_chain: return "integral_chain";
        case EstimatorKind::extended_observer: return "extended_observer";
        case EstimatorKind::classical_high_gain: return "classical_high_gain";
    }
    return "?";
}

std::string_view to_string(ApproximatorKind kind) { return kind == ApproximatorKind::fuzzy ? "fuzzy" : "rbf"; }

std::string_view to_string(ControlMemory memory) { return memory == ControlMemory::filtered ? "filtered" : "one_step"; }

simkit::Scenario scenario_from_document(const toml::Document& doc) {
    simkit::Scenario s;

    for (const auto& t : doc.tables) {
        static constexpr std::string_view known[] = {"plant", "estimator", "approximator", "controller", "sim", "noise"};
        if (std::find(std::begin(known), std::end(known), t.name) == std::end(known)) {
            fail_at(t.pos, "unknown section [" + t.name + "]");
        }
    }

    const Section root(&doc.root, "the top level", {"name"});
    if (root.get("name")) s.name = root.text("name");

    const Section plant(doc.find("plant"), "[plant]",
                        {"gravity", "cart_mass", "pendulum_mass", "half_length", "initial_state", "reference_amplitude",
                         "reference_frequency"});
    plant.number("gravity", s.plant.gravity);
    plant.number("cart_mass", s.plant.cart_mass);
    plant.number("pendulum_mass", s.plant.pendulum_mass);
    plant.number("half_length", s.plant.half_length);
    plant.vector("initial_state", s.initial_state);
    plant.number("reference_amplitude", s.reference_amplitude);
    plant.number("reference_frequency", s.reference_freq);

    const Section est(doc.find("estimator"), "[estimator]", {"kind", "epsilon", "gains", "clamp_limit", "clamp_window"});
    if (est.present()) {
        if (est.text("kind") == "none") {
            if (est.size() > 1) fail_at(est.require("kind").pos, "estimator kind 'none' takes no other keys");
            s.estimator.reset();
        } else {
            simkit::EstimatorConfig e;
            e.kind = parse_enum(est, "kind",
                                {EstimatorKind::integral_chain, EstimatorKind::extended_observer,
                                 EstimatorKind::classical_high_gain});
            est.number("epsilon", e.epsilon);
            est.vector("gains", e.gains);
            est.number("clamp_limit", e.clamp.limit);
            est.number("clamp_window", e.clamp.window_epsilons);
            s.estimator = e;
        }
    }

    const Section ctl(doc.find("controller"), "[controller]", {"kind", "gains", "u_limit", "gain_floor_fraction", "memory"});
    if (ctl.present()) {
        s.controller.kind = parse_enum(ctl, "kind",
                                       {ControllerKind::open_loop, ControllerKind::full_state, ControllerKind::adaptive,
                                        ControllerKind::differentiator, ControllerKind::observer});
        ctl.vector("gains", s.controller.gains);
        ctl.number("u_limit", s.controller.u_limit);
        ctl.number("gain_floor_fraction", s.controller.gain_floor_fraction);
        if (ctl.get("memory")) s.controller.memory = parse_enum(ctl, "memory", {ControlMemory::filtered, ControlMemory::one_step});
    }

    const Section apx(doc.find("approximator"), "[approximator]",
                      {"kind", "gamma", "q_scale", "initial_value", "fuzzy_centers", "fuzzy_widths", "rbf_centers",
                       "rbf_widths"});
    if (apx.present()) {
        simkit::ApproximatorConfig a;
        a.kind = parse_enum(apx, "kind", {ApproximatorKind::fuzzy, ApproximatorKind::rbf});
        apx.number("gamma", a.gamma);
        apx.number("q_scale", a.q_scale);
        apx.number("initial_value", a.initial_value);
        if (apx.get("fuzzy_centers") || apx.get("fuzzy_widths")) {
            const auto centers = as_vector(apx.require("fuzzy_centers"), "fuzzy_centers");
            const auto widths = as_vector(apx.require("fuzzy_widths"), "fuzzy_widths");
            if (centers.size() != widths.size()) {
                fail_at(apx.require("fuzzy_widths").pos, "fuzzy_centers and fuzzy_widths differ in length");
            }
            a.fuzzy_sets.clear();
            for (std::size_t i = 0; i < centers.size(); ++i) a.fuzzy_sets.push_back({centers[i], widths[i]});
        }
        if (apx.get("rbf_centers") || apx.get("rbf_widths")) {
            a.rbf.centers = as_matrix(apx.require("rbf_centers"), "rbf_centers");
            a.rbf.widths = as_vector(apx.require("rbf_widths"), "rbf_widths");
        }
        s.approximator = a;
    } else if (s.controller.kind == ControllerKind::adaptive) {
        s.approximator = simkit::ApproximatorConfig{};
    }

    const Section sim(doc.find("sim"), "[sim]", {"t_end", "step", "decimation"});
    if (sim.present()) {
        s.sim.t_end = as_number(sim.require("t_end"), "t_end");
        s.sim.step = as_number(sim.require("step"), "step");
        s.sim.decimation = sim.unsigned_integer("decimation", s.sim.decimation);
    }

    const Section noise(doc.find("noise"), "[noise]", {"amplitude", "seed"});
    if (noise.present()) {
        simkit::NoiseConfig n;
        n.amplitude = as_number(noise.require("amplitude"), "amplitude");
        n.seed = noise.unsigned_integer("seed", n.seed);
        s.noise = n;
    }

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

simkit::Scenario parse_scenario(std::string_view text) {
    toml::Document doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::ParseError& e) {
        throw ConfigError(e.what());
    }
    return scenario_from_document(doc);
}

simkit::Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

toml::Document to_document(const simkit::Scenario& s) {
    toml::Document doc;
    put(doc.root, "name", str(s.name));

    toml::Table plant{"plant", {}, {}};
    put(plant, "gravity", num(s.plant.gravity));
    put(plant, "cart_mass", num(s.plant.cart_mass));
    put(plant, "pendulum_mass", num(s.plant.pendulum_mass));
    put(plant, "half_length", num(s.plant.half_length));
    put(plant, "initial_state", vec(s.initial_state));
    put(plant, "reference_amplitude", num(s.reference_amplitude));
    put(plant, "reference_frequency", num(s.reference_freq));
    doc.tables.push_back(std::move(plant));

    toml::Table est{"estimator", {}, {}};
    if (s.estimator) {
        put(est, "kind", str(to_string(s.estimator->kind)));
        put(est, "epsilon", num(s.estimator->epsilon));
        put(est, "gains", vec(s.estimator->gains));
        put(est, "clamp_limit", num(s.estimator->clamp.limit));
        put(est, "clamp_window", num(s.estimator->clamp.window_epsilons));
    } else {
        put(est, "kind", str("none"));
    }
    doc.tables.push_back(std::move(est));

    if (s.approximator) {
        const auto& a = *s.approximator;
        toml::Table apx{"approximator", {}, {}};
        put(apx, "kind", str(to_string(a.kind)));
        put(apx, "gamma", num(a.gamma));
        put(apx, "q_scale", num(a.q_scale));
        put(apx, "initial_value", num(a.initial_value));
        std::vector<double> centers, widths;
        for (const auto& g : a.fuzzy_sets) {
            centers.push_back(g.center);
            widths.push_back(g.width);
        }
        put(apx, "fuzzy_centers", vec(centers));
        put(apx, "fuzzy_widths", vec(widths));
        toml::Array rows;
        for (const auto& c : a.rbf.centers) rows.push_back(vec(c));
        put(apx, "rbf_centers", toml::Value{std::move(rows), {}});
        put(apx, "rbf_widths", vec(a.rbf.widths));
        doc.tables.push_back(std::move(apx));
    }

    toml::Table ctl{"controller", {}, {}};
    put(ctl, "kind", str(to_string(s.controller.kind)));
    put(ctl, "gains", vec(s.controller.gains));
    put(ctl, "u_limit", num(s.controller.u_limit));
    put(ctl, "gain_floor_fraction", num(s.controller.gain_floor_fraction));
    put(ctl, "memory", str(to_string(s.controller.memory)));
    doc.tables.push_back(std::move(ctl));

    toml::Table sim{"sim", {}, {}};
    put(sim, "t_end", num(s.sim.t_end));
    put(sim, "step", num(s.sim.step));
    put(sim, "decimation", integer(static_cast<std::int64_t>(s.sim.decimation)));
    doc.tables.push_back(std::move(sim));

    if (s.noise) {
        if (s.noise->seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            throw ConfigError("noise seed does not fit a TOML integer");
        }
        toml::Table noise{"noise", {}, {}};
        put(noise, "amplitude", num(s.noise->amplitude));
        put(noise, "seed", integer(static_cast<std::int64_t>(s.noise->seed)));
        doc.tables.push_back(std::move(noise));
    }
    return doc;
}

std::string to_toml(const simkit::Scenario& s) { return toml::serialize(to_document(s)); }

}  // namespace obslab::cli
