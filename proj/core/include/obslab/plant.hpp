#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

// Integrator-chain plants x_1' = x_2, ..., x_n' = f(x) + g(x) u, y = x_1, with
// the cart-pole angle subsystem as the reference instance.
namespace obslab::plant {

struct PendulumParams {
    double gravity = 9.8;        // m/s^2
    double cart_mass = 1.0;      // kg
    double pendulum_mass = 0.1;  // kg
    double half_length = 0.5;    // m

    /// Throws std::invalid_argument for non-positive masses/lengths or a
    /// denominator that can vanish.
    void validate() const;

    friend bool operator==(const PendulumParams&, const PendulumParams&) = default;
};

double pendulum_drift(std::span<const double> x, const PendulumParams& p);
double pendulum_input_gain(std::span<const double> x, const PendulumParams& p);

/// (x_2, f(x) + g(x) u) for the angle subsystem.
std::array<double, 2> pendulum_dynamics(std::span<const double> x, double u, const PendulumParams& p);

/// Box used for sampling invariants and bound constants.
struct OperatingDomain {
    std::vector<double> lower{-std::numbers::pi / 3.0, -5.0};
    std::vector<double> upper{std::numbers::pi / 3.0, 5.0};
};

struct GainBounds {
    double l_inf = 0.0;
    double l_sup = 0.0;
};

class PlantModel {
public:
    using StateFn = std::function<double(std::span<const double>)>;

    PlantModel(std::size_t order, StateFn drift, StateFn input_gain, GainBounds bounds);

    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] GainBounds gain_bounds() const noexcept { return bounds_; }

    [[nodiscard]] double drift(std::span<const double> x) const { return drift_(x); }
    [[nodiscard]] double input_gain(std::span<const double> x) const { return input_gain_(x); }

    /// Writes x' into dx (both of length order()).
    void derivative(std::span<const double> x, double u, std::span<double> dx) const;

private:
    std::size_t order_;
    StateFn drift_;
    StateFn input_gain_;
    GainBounds bounds_;
};

/// min/max |g| over a uniform grid of the domain (points per axis).
GainBounds sample_gain_bounds(const PlantModel::StateFn& input_gain, const OperatingDomain& domain,
                              std::size_t points_per_axis = 61);

PlantModel make_pendulum(const PendulumParams& p, const OperatingDomain& domain = {});

/// y_d(t) = amplitude * sin(angular_freq * t) and its analytic derivatives.
class Reference {
public:
    Reference() = default;
    Reference(double amplitude, double angular_freq);

    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] double angular_freq() const noexcept { return angular_freq_; }

    /// order-th time derivative at t.
    [[nodiscard]] double derivative(double t, std::size_t order) const;

    /// (y_d, y_d', ..., y_d^(count-1)) at t.
    [[nodiscard]] std::vector<double> derivatives(double t, std::size_t count) const;

private:
    double amplitude_ = 0.1;
    double angular_freq_ = std::numbers::pi;
};

/// e_i = x_i - y_d^(i-1)(t).
std::vector<double> tracking_error(std::span<const double> x, double t, const Reference& ref);

}  // namespace obslab::plant
