#include "obslab/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "obslab/errors.hpp"

namespace obslab::simkit {

namespace {

constexpr double kMaxSteps = 1e8;

using estimators::EstimatorKind;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::size_t step_count(const SimConfig& sim) {
    return static_cast<std::size_t>(std::max(1.0, std::round(sim.t_end / sim.step)));
}

std::string format_time(double t) {
    std::ostringstream os;
    os.precision(9);
    os << t;
    return os.str();
}

}  // namespace

void Rk4::step(const Rhs& rhs, double t, std::span<double> state, double h) {
    const std::size_t n = state.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);

    auto stage = [&](double ts, std::span<const double> x, std::vector<double>& k) {
        rhs(ts, x, k);
        if (!all_finite(k)) {
            throw IntegrationDivergedError("integration diverged at t = " + format_time(ts), ts);
        }
    };

    stage(t, state, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state[i] + 0.5 * h * k1_[i];
    stage(t + 0.5 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state[i] + 0.5 * h * k2_[i];
    stage(t + 0.5 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = state[i] + h * k3_[i];
    stage(t + h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
        state[i] += (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    if (!all_finite(state)) {
        throw IntegrationDivergedError("integration diverged at t = " + format_time(t + h), t + h);
    }
}

std::vector<double> rk4_step(const Rhs& rhs, double t, std::span<const double> state, double h) {
    std::vector<double> out(state.begin(), state.end());
    Rk4 rk;
    rk.step(rhs, t, out, h);
    return out;
}

NoiseSource::NoiseSource(double amplitude, std::uint64_t seed) : amplitude_(amplitude), state_(seed) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument("NoiseSource: amplitude must be finite and non-negative");
    }
}

std::uint64_t NoiseSource::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double NoiseSource::sample() {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0, 1)
    return amplitude_ == 0.0 ? 0.0 : amplitude_ * (2.0 * unit - 1.0);
}

NoiseSource NoiseSource::split() { return NoiseSource(amplitude_, next()); }

double stability_step_bound(double epsilon, std::span<const double> a) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("stability_step_bound: epsilon must be positive");
    double largest = 0.0;
    for (const auto& r : numkit::roots(numkit::gain_polynomial(a))) largest = std::max(largest, std::abs(r));
    if (!(largest > 0.0)) throw std::invalid_argument("stability_step_bound: degenerate gain polynomial");
    return 2.5 * epsilon / largest;
}

double stability_step_bound(const estimators::EstimatorGains& g) { return stability_step_bound(g.epsilon(), g.a()); }

bool needs_estimator(ControllerKind kind) {
    return kind == ControllerKind::differentiator || kind == ControllerKind::observer;
}

void Scenario::validate() const {
    plant.validate();
    if (initial_state.size() != 2 || !all_finite(initial_state)) {
        throw std::invalid_argument("scenario: initial_state must hold two finite values");
    }
    if (!std::isfinite(reference_amplitude) || !std::isfinite(reference_freq)) {
        throw std::invalid_argument("scenario: reference parameters must be finite");
    }
    if (!(sim.step > 0.0) || !(sim.t_end > 0.0) || !std::isfinite(sim.step) || !std::isfinite(sim.t_end)) {
        throw std::invalid_argument("scenario: sim.step and sim.t_end must be positive");
    }
    if (sim.t_end / sim.step > kMaxSteps) {
        throw BudgetExceededError("scenario: t_end / step exceeds the 1e8 step budget");
    }
    if (sim.decimation == 0) throw std::invalid_argument("scenario: sim.decimation must be at least 1");

    const control::GainVector k(controller.gains);
    if (k.size() != initial_state.size()) {
        throw std::invalid_argument("scenario: controller.gains must have one entry per state");
    }
    if (!(controller.u_limit > 0.0)) throw std::invalid_argument("scenario: controller.u_limit must be positive");
    if (!(controller.gain_floor_fraction >= 0.0)) {
        throw std::invalid_argument("scenario: controller.gain_floor_fraction must be non-negative");
    }

    if (needs_estimator(controller.kind) && !estimator) {
        throw std::invalid_argument("scenario: controller requires an estimator");
    }
    if (estimator) {
        const estimators::EstimatorGains g(initial_state.size(), estimator->epsilon, estimator->gains);
        if (!(estimator->clamp.limit > 0.0) || !(estimator->clamp.window_epsilons >= 0.0)) {
            throw std::invalid_argument("scenario: estimator clamp must be positive");
        }
        if (controller.kind == ControllerKind::differentiator && estimator->kind == EstimatorKind::extended_observer) {
            throw std::invalid_argument("scenario: differentiator controller needs an integral_chain or classical_high_gain estimator");
        }
        if (controller.kind == ControllerKind::observer && estimator->kind != EstimatorKind::extended_observer) {
            throw std::invalid_argument("scenario: observer controller needs an extended_observer estimator");
        }
        const double bound = stability_step_bound(g);
        if (sim.step > bound) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "scenario: step " << sim.step << " exceeds the estimator stability bound " << bound
                << " (epsilon " << estimator->epsilon << ")";
            throw std::invalid_argument(msg.str());
        }
    }

    if (controller.kind == ControllerKind::adaptive) {
        if (!approximator) throw std::invalid_argument("scenario: adaptive controller requires an approximator");
    } else if (approximator) {
        throw std::invalid_argument("scenario: approximator is only used by the adaptive controller");
    }
    if (approximator) {
        if (!(approximator->gamma > 0.0) || !(approximator->q_scale > 0.0) || !std::isfinite(approximator->initial_value)) {
            throw std::invalid_argument("scenario: approximator gamma and q_scale must be positive");
        }
        if (approximator->kind == ApproximatorKind::fuzzy) {
            approximators::MembershipGrid::uniform(initial_state.size(), approximator->fuzzy_sets);
        } else {
            approximator->rbf.validate(initial_state.size());
        }
    }
    if (noise && (!(noise->amplitude >= 0.0) || !std::isfinite(noise->amplitude))) {
        throw std::invalid_argument("scenario: noise amplitude must be non-negative");
    }
}

ScenarioSetup prepare(const Scenario& s) {
    s.validate();
    auto model = plant::make_pendulum(s.plant);
    plant::Reference ref(s.reference_amplitude, s.reference_freq);
    control::GainVector k(s.controller.gains);
    control::ControlLimits limits{s.controller.u_limit, s.controller.gain_floor_fraction * model.gain_bounds().l_inf};
    auto bounds = control::estimate_bounds(model, ref, k, s.controller.u_limit);

    std::optional<estimators::EstimatorGains> est;
    if (s.estimator) est.emplace(model.order(), s.estimator->epsilon, s.estimator->gains);

    std::optional<numkit::LyapunovPair> lyap;
    std::optional<approximators::MembershipGrid> grid;
    if (s.approximator) {
        const std::size_t n = model.order();
        lyap = numkit::lyapunov_pair(k.companion().lambda, s.approximator->q_scale * numkit::Matrix::identity(n));
        if (s.approximator->kind == ApproximatorKind::fuzzy) {
            grid = approximators::MembershipGrid::uniform(n, s.approximator->fuzzy_sets);
        }
    }
    return ScenarioSetup{std::move(model), ref,  std::move(k),    limits,
                         bounds,           est,  std::move(lyap), std::move(grid),
                         step_count(s.sim)};
}

std::vector<std::string> trace_columns(const Scenario& s) {
    const std::size_t n = s.initial_state.size();
    std::vector<std::string> names{"t"};
    for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    names.emplace_back("y");
    names.emplace_back("noise");
    for (std::size_t i = 0; i <= n; ++i) names.push_back("yd" + std::to_string(i));
    for (const char* c : {"u", "saturated", "gain_floored", "f", "fhat"}) names.emplace_back(c);
    for (std::size_t i = 1; i <= n; ++i) names.push_back("e" + std::to_string(i));
    names.emplace_back("phi");
    if (s.estimator) {
        for (std::size_t i = 1; i <= n + 1; ++i) names.push_back("xhat" + std::to_string(i));
        for (std::size_t i = 1; i <= n + 1; ++i) names.push_back("z" + std::to_string(i));
    }
    if (s.approximator) {
        const bool fuzzy = s.approximator->kind == ApproximatorKind::fuzzy;
        const std::size_t count = fuzzy ? static_cast<std::size_t>(std::pow(s.approximator->fuzzy_sets.size(), n))
                                        : s.approximator->rbf.centers.size();
        for (std::size_t j = 1; j <= count; ++j) names.push_back((fuzzy ? "theta" : "w") + std::to_string(j));
    }
    return names;
}

SimTrace run_closed_loop(const Scenario& s) {
    const ScenarioSetup setup = prepare(s);
    const auto& model = setup.plant;
    const auto& ref = setup.reference;
    const std::size_t n = model.order();
    const std::size_t m = setup.estimator ? n + 1 : 0;
    const bool filtered_memory =
        s.controller.kind == ControllerKind::differentiator && s.controller.memory == ControlMemory::filtered;
    const std::size_t r = filtered_memory ? n + 1 : 0;
    const std::size_t params = s.approximator ? (setup.grid ? setup.grid->rule_count() : s.approximator->rbf.centers.size()) : 0;
    const double h = s.sim.step;
    const std::size_t steps = setup.steps;

    SimTrace trace(trace_columns(s));

    std::optional<NoiseSource> noise;
    if (s.noise) noise.emplace(s.noise->amplitude, s.noise->seed);
    auto draw = [&noise] { return noise ? noise->sample() : 0.0; };

    std::vector<double> state(n + m + r + params, 0.0);
    std::copy(s.initial_state.begin(), s.initial_state.end(), state.begin());
    double noise_k = draw();
    if (setup.estimator) {
        const auto x0 = estimators::initial_estimate(*setup.estimator, state[0] + noise_k);
        std::copy(x0.begin(), x0.end(), state.begin() + static_cast<std::ptrdiff_t>(n));
    }
    if (params > 0) {
        std::fill(state.begin() + static_cast<std::ptrdiff_t>(n + m + r), state.end(), s.approximator->initial_value);
    }

    const EstimatorKind est_kind = s.estimator ? s.estimator->kind : EstimatorKind::integral_chain;
    const double gamma = s.approximator ? s.approximator->gamma : 0.0;

    // The adaptive laws are written for the error y_d - x, the negative of the logged tracking error.
    auto adaptation_error = [&](std::span<const double> x, double t) {
        auto e = plant::tracking_error(x, t, ref);
        for (double& v : e) v = -v;
        return e;
    };
    auto approx_basis = [&](std::span<const double> x, std::span<const double> e) {
        return setup.grid ? approximators::fuzzy_basis(x, *setup.grid) : approximators::rbf_hidden(e, s.approximator->rbf);
    };

    Rk4 rk;
    std::vector<double> row(trace.cols());
    std::vector<double> xh_ctrl(m);
    double u_prev = 0.0;

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const std::span<const double> x(state.data(), n);
        const std::span<const double> xh(state.data() + n, m);
        const std::span<const double> theta(state.data() + n + m + r, params);
        const double y = x[0] + noise_k;

        std::copy(xh.begin(), xh.end(), xh_ctrl.begin());
        if (s.estimator) s.estimator->clamp.apply(t, s.estimator->epsilon, xh_ctrl);
        const std::span<const double> xh_x(xh_ctrl.data(), n);

        control::ControlCommand cmd;
        switch (s.controller.kind) {
            case ControllerKind::open_loop:
                break;
            case ControllerKind::full_state:
                cmd = control::full_state_control(x, t, setup.gains, model, ref, setup.limits);
                break;
            case ControllerKind::adaptive: {
                const auto basis = approx_basis(x, adaptation_error(x, t));
                const double f_hat = setup.grid ? approximators::fuzzy_output(theta, basis)
                                                : approximators::rbf_output(theta, basis);
                cmd = control::adaptive_control(f_hat, x, t, setup.gains, model.input_gain(x), ref, setup.limits);
                break;
            }
            case ControllerKind::differentiator:
                cmd = control::differentiator_control(xh_ctrl, t, setup.gains, model.input_gain(xh_x),
                                                      filtered_memory ? state[n + m] : u_prev, ref, setup.limits);
                break;
            case ControllerKind::observer:
                cmd = control::observer_control(xh_ctrl, t, setup.gains, model.input_gain(xh_x), ref, setup.limits);
                break;
        }

        if (k % s.sim.decimation == 0 || k == steps) {
            const double f = model.drift(x);
            const double g = model.input_gain(x);
            const auto e = plant::tracking_error(x, t, ref);
            double phi = std::abs(f - cmd.f_hat);
            if (s.controller.kind == ControllerKind::differentiator) {
                phi = control::phi_diagnostic(f + g * cmd.u, xh[n], x, xh, setup.gains, setup.bounds,
                                              control::PhiVariant::differentiator);
            } else if (s.controller.kind == ControllerKind::observer) {
                phi = control::phi_diagnostic(f, xh[n], x, xh, setup.gains, setup.bounds, control::PhiVariant::observer);
            }

            std::size_t c = 0;
            row[c++] = t;
            for (double v : x) row[c++] = v;
            row[c++] = y;
            row[c++] = noise_k;
            for (std::size_t i = 0; i <= n; ++i) row[c++] = ref.derivative(t, i);
            row[c++] = cmd.u;
            row[c++] = cmd.saturated ? 1.0 : 0.0;
            row[c++] = cmd.gain_floored ? 1.0 : 0.0;
            row[c++] = f;
            row[c++] = s.controller.kind == ControllerKind::full_state ? f : cmd.f_hat;
            for (double v : e) row[c++] = v;
            row[c++] = phi;
            if (m > 0) {
                for (double v : xh) row[c++] = v;
                for (std::size_t i = 0; i < n; ++i) row[c++] = xh[i] - x[i];
                const double extended = est_kind == EstimatorKind::extended_observer ? f : f + g * cmd.u;
                row[c++] = xh[n] - extended;
            }
            for (double v : theta) row[c++] = v;
            trace.append(row);
        }
        if (k == steps) break;

        const double u = cmd.u;
        const double held_noise = noise_k;
        const Rhs rhs = [&](double ts, std::span<const double> st, std::span<double> ds) {
            const std::span<const double> xs(st.data(), n);
            model.derivative(xs, u, ds.subspan(0, n));
            if (m > 0) {
                const std::span<const double> xhs(st.data() + n, m);
                const auto dxh = ds.subspan(n, m);
                const double ys = xs[0] + held_noise;
                switch (est_kind) {
                    case EstimatorKind::integral_chain:
                        estimators::differentiator_rhs(xhs, ys, *setup.estimator, dxh);
                        break;
                    case EstimatorKind::classical_high_gain:
                        estimators::high_gain_rhs(xhs, ys, *setup.estimator, dxh);
                        break;
                    case EstimatorKind::extended_observer:
                        estimators::observer_rhs(xhs, ys, u, model.input_gain(xhs.first(n)), *setup.estimator, dxh);
                        break;
                }
            }
            if (r > 0) {
                estimators::differentiator_rhs(st.subspan(n + m, r), u, *setup.estimator, ds.subspan(n + m, r));
            }
            if (params > 0) {
                const auto e = adaptation_error(xs, ts);
                const double w = approximators::error_weight(e, setup.lyapunov->p);
                const auto basis = approx_basis(xs, e);
                for (std::size_t j = 0; j < params; ++j) ds[n + m + r + j] = -gamma * w * basis[j];
            }
        };
        rk.step(rhs, t, state, h);
        u_prev = u;
        noise_k = draw();
    }
    return trace;
}

}  // namespace obslab::simkit
