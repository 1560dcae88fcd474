#include "obslab/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace obslab::plant {

namespace {

double denominator(double x1, const PendulumParams& p) {
    const double c = std::cos(x1);
    return p.half_length * (4.0 / 3.0 - p.pendulum_mass * c * c / (p.cart_mass + p.pendulum_mass));
}

void require_state(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("pendulum: state must have two entries");
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw std::invalid_argument("pendulum: non-finite state");
}

}  // namespace

void PendulumParams::validate() const {
    if (!(gravity > 0.0) || !(cart_mass > 0.0) || !(pendulum_mass > 0.0) || !(half_length > 0.0)) {
        throw std::invalid_argument("PendulumParams: gravity, masses and half length must be positive");
    }
    // cos^2 <= 1, so positivity at x_1 = 0 covers every angle.
    if (!(pendulum_mass / (cart_mass + pendulum_mass) < 4.0 / 3.0)) {
        throw std::invalid_argument("PendulumParams: dynamics denominator can vanish");
    }
}

double pendulum_drift(std::span<const double> x, const PendulumParams& p) {
    require_state(x);
    const double s = std::sin(x[0]);
    const double c = std::cos(x[0]);
    const double total = p.cart_mass + p.pendulum_mass;
    const double num = p.gravity * s - p.pendulum_mass * p.half_length * x[1] * x[1] * c * s / total;
    return num / denominator(x[0], p);
}

double pendulum_input_gain(std::span<const double> x, const PendulumParams& p) {
    require_state(x);
    return (std::cos(x[0]) / (p.cart_mass + p.pendulum_mass)) / denominator(x[0], p);
}

std::array<double, 2> pendulum_dynamics(std::span<const double> x, double u, const PendulumParams& p) {
    if (!std::isfinite(u)) throw std::invalid_argument("pendulum_dynamics: non-finite input");
    return {x[1], pendulum_drift(x, p) + pendulum_input_gain(x, p) * u};
}

PlantModel::PlantModel(std::size_t order, StateFn drift, StateFn input_gain, GainBounds bounds)
    : order_(order), drift_(std::move(drift)), input_gain_(std::move(input_gain)), bounds_(bounds) {
    if (order_ == 0) throw std::invalid_argument("PlantModel: order must be positive");
    if (!drift_ || !input_gain_) throw std::invalid_argument("PlantModel: drift and input gain are required");
    if (!(bounds_.l_inf > 0.0) || bounds_.l_sup < bounds_.l_inf) {
        throw std::invalid_argument("PlantModel: need 0 < l_inf <= l_sup");
    }
}

void PlantModel::derivative(std::span<const double> x, double u, std::span<double> dx) const {
    for (std::size_t i = 0; i + 1 < order_; ++i) dx[i] = x[i + 1];
    dx[order_ - 1] = drift_(x) + input_gain_(x) * u;
}

GainBounds sample_gain_bounds(const PlantModel::StateFn& input_gain, const OperatingDomain& domain,
                              std::size_t points_per_axis) {
    const std::size_t dims = domain.lower.size();
    if (dims == 0 || domain.upper.size() != dims || points_per_axis < 2) {
        throw std::invalid_argument("sample_gain_bounds: malformed domain");
    }
    GainBounds out{std::numeric_limits<double>::infinity(), 0.0};
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> x(dims);
    while (true) {
        for (std::size_t d = 0; d < dims; ++d) {
            const double frac = static_cast<double>(idx[d]) / static_cast<double>(points_per_axis - 1);
            x[d] = domain.lower[d] + frac * (domain.upper[d] - domain.lower[d]);
        }
        const double g = std::abs(input_gain(x));
        out.l_inf = std::min(out.l_inf, g);
        out.l_sup = std::max(out.l_sup, g);
        std::size_t d = 0;
        while (d < dims && ++idx[d] == points_per_axis) idx[d++] = 0;
        if (d == dims) break;
    }
    return out;
}

PlantModel make_pendulum(const PendulumParams& p, const OperatingDomain& domain) {
    p.validate();
    auto drift = [p](std::span<const double> x) { return pendulum_drift(x, p); };
    auto gain = [p](std::span<const double> x) { return pendulum_input_gain(x, p); };
    const auto bounds = sample_gain_bounds(gain, domain);
    return PlantModel(2, drift, gain, bounds);
}

Reference::Reference(double amplitude, double angular_freq) : amplitude_(amplitude), angular_freq_(angular_freq) {
    if (!std::isfinite(amplitude) || !std::isfinite(angular_freq)) {
        throw std::invalid_argument("Reference: non-finite parameters");
    }
}

double Reference::derivative(double t, std::size_t order) const {
    // d^k/dt^k sin(w t) = w^k sin(w t + k pi/2); the phase is reduced mod 4
    // so sin/cos are evaluated exactly at the quarter turns.
    const double scale = amplitude_ * std::pow(angular_freq_, static_cast<double>(order));
    const double arg = angular_freq_ * t;
    switch (order % 4) {
        case 0: return scale * std::sin(arg);
        case 1: return scale * std::cos(arg);
        case 2: return -scale * std::sin(arg);
        default: return -scale * std::cos(arg);
    }
}

std::vector<double> Reference::derivatives(double t, std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = derivative(t, k);
    return out;
}

std::vector<double> tracking_error(std::span<const double> x, double t, const Reference& ref) {
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] - ref.derivative(t, i);
    return e;
}

}  // namespace obslab::plant
