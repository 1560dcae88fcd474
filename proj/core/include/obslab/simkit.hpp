#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obslab/approximators.hpp"
#include "obslab/control.hpp"
#include "obslab/estimators.hpp"
#include "obslab/plant.hpp"
#include "obslab/trace.hpp"

namespace obslab::simkit {

using Rhs = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

/// Classical fourth-order Runge-Kutta with reusable stage buffers.
class Rk4 {
public:
    /// Advances `state` in place from t to t + h. Throws
    /// IntegrationDivergedError if any stage derivative is non-finite.
    void step(const Rhs& rhs, double t, std::span<double> state, double h);

private:
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

std::vector<double> rk4_step(const Rhs& rhs, double t, std::span<const double> state, double h);

/// Uniform measurement noise on [-A, A] from a SplitMix64 stream.
class NoiseSource {
public:
    NoiseSource(double amplitude, std::uint64_t seed);

    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }

    double sample();

    /// Independent child stream seeded from this one.
    NoiseSource split();

private:
    std::uint64_t next();

    double amplitude_;
    std::uint64_t state_;
};

/// 2.5 / max|eigenvalue| of the estimator's linear part, i.e. 2.5 eps /
/// max|root of s^{n+1} + a_{n+1} s^n + ... + a_1|.
double stability_step_bound(double epsilon, std::span<const double> a);
double stability_step_bound(const estimators::EstimatorGains& g);

enum class ControllerKind { open_loop, full_state, adaptive, differentiator, observer };
enum class ApproximatorKind { fuzzy, rbf };

/// Which control value the differentiator law pairs with xhat_{n+1} when it
/// forms fhat = xhat_{n+1} - g(xhat) u.
enum class ControlMemory {
    filtered,  // previous controls passed through the estimator's H_1 low-pass
    one_step,  // the control applied during the previous step
};

struct EstimatorConfig {
    estimators::EstimatorKind kind = estimators::EstimatorKind::integral_chain;
    double epsilon = 0.01;
    std::vector<double> gains{10.0, 10.0, 10.0};
    estimators::PeakingClamp clamp{};

    friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

struct ApproximatorConfig {
    ApproximatorKind kind = ApproximatorKind::fuzzy;
    double gamma = 100.0;
    double q_scale = 50.0;       // Q = q_scale * I
    double initial_value = 0.1;  // every theta_f / W entry at t = 0
    std::vector<approximators::Gaussian> fuzzy_sets = approximators::MembershipGrid::five_set(1).sets(0);
    approximators::RbfLayout rbf = approximators::RbfLayout::diagonal(2);

    friend bool operator==(const ApproximatorConfig&, const ApproximatorConfig&) = default;
};

struct ControllerConfig {
    ControllerKind kind = ControllerKind::differentiator;
    std::vector<double> gains{20.0, 10.0};
    double u_limit = 50.0;
    double gain_floor_fraction = 0.1;  // floor = fraction * l_inf
    ControlMemory memory = ControlMemory::filtered;

    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct SimConfig {
    double t_end = 10.0;
    double step = 1e-4;
    std::size_t decimation = 10;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct NoiseConfig {
    double amplitude = 0.01;
    std::uint64_t seed = 1;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// Defaults reproduce the integral-chain differentiator experiment on the
/// pendulum: eps = 0.01, a = (10, 10, 10), K = (20, 10), y_d = 0.1 sin(pi t).
struct Scenario {
    std::string name = "custom";
    plant::PendulumParams plant{};
    std::vector<double> initial_state{std::numbers::pi / 60.0, 0.0};
    double reference_amplitude = 0.1;
    double reference_freq = std::numbers::pi;
    std::optional<EstimatorConfig> estimator = EstimatorConfig{};
    std::optional<ApproximatorConfig> approximator{};
    ControllerConfig controller{};
    SimConfig sim{};
    std::optional<NoiseConfig> noise{};

    /// Throws std::invalid_argument (or BudgetExceededError) on an
    /// inconsistent scenario.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

bool needs_estimator(ControllerKind kind);

/// Objects derived from a Scenario before integration starts.
struct ScenarioSetup {
    plant::PlantModel plant;
    plant::Reference reference;
    control::GainVector gains;
    control::ControlLimits limits;
    control::BoundSet bounds;
    std::optional<estimators::EstimatorGains> estimator;
    std::optional<numkit::LyapunovPair> lyapunov;  // adaptive controllers only
    std::optional<approximators::MembershipGrid> grid;
    std::size_t steps = 0;
};

ScenarioSetup prepare(const Scenario& s);

/// Integrates plant, estimator and adaptive parameters on one fixed grid with
/// zero-order-hold control and records every `decimation`-th step plus the
/// final one.
SimTrace run_closed_loop(const Scenario& s);

/// Column names run_closed_loop produces for this scenario, in order.
std::vector<std::string> trace_columns(const Scenario& s);

}  // namespace obslab::simkit
