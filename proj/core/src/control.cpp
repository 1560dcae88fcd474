#include "obslab/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace obslab::control {

namespace {

ControlCommand tracking_law(double f_hat, std::span<const double> state, std::size_t n, double t,
                            const GainVector& k, double g, const plant::Reference& ref, const ControlLimits& limits) {
    if (state.size() < n || k.size() != n) throw std::invalid_argument("control law: dimension mismatch");
    ControlCommand cmd;
    cmd.f_hat = f_hat;
    cmd.g_hat_used = g;
    if (std::abs(g) < limits.gain_floor) {
        cmd.g_hat_used = g < 0.0 ? -limits.gain_floor : limits.gain_floor;
        cmd.gain_floored = true;
    }
    double ke = 0.0;
    for (std::size_t i = 0; i < n; ++i) ke += k.values()[i] * (state[i] - ref.derivative(t, i));
    const double raw = (-f_hat + ref.derivative(t, n) - ke) / cmd.g_hat_used;
    cmd.u = saturate(raw, limits.u_limit);
    cmd.saturated = cmd.u != raw;
    return cmd;
}

}  // namespace

GainVector::GainVector(std::vector<double> k) : k_(std::move(k)) {
    if (k_.empty()) throw std::invalid_argument("GainVector: empty");
    for (double v : k_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("GainVector: gains must be positive");
    }
    if (!numkit::routh_hurwitz(numkit::gain_polynomial(k_))) {
        throw std::invalid_argument("GainVector: s^n + k_n s^{n-1} + ... + k_1 is not Hurwitz");
    }
}

double GainVector::dot(std::span<const double> e) const {
    if (e.size() != k_.size()) throw std::invalid_argument("GainVector::dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += k_[i] * e[i];
    return s;
}

void BoundSet::validate() const {
    for (double v : {l_u, l_g, l_inf, l_sup, l_1, l_h, l_B}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("BoundSet: constants must be positive");
    }
    if (l_inf > l_sup) throw std::invalid_argument("BoundSet: l_inf > l_sup");
}

ControlLimits default_limits(const plant::GainBounds& bounds, double u_limit) {
    return ControlLimits{u_limit, 0.1 * bounds.l_inf};
}

double saturate(double u, double limit) { return std::clamp(u, -limit, limit); }

ControlCommand full_state_control(std::span<const double> x, double t, const GainVector& k,
                                  const plant::PlantModel& plant, const plant::Reference& ref,
                                  const ControlLimits& limits) {
    return tracking_law(plant.drift(x), x, plant.order(), t, k, plant.input_gain(x), ref, limits);
}

ControlCommand adaptive_control(double f_hat, std::span<const double> x, double t, const GainVector& k, double g_eval,
                                const plant::Reference& ref, const ControlLimits& limits) {
    return tracking_law(f_hat, x, k.size(), t, k, g_eval, ref, limits);
}

ControlCommand differentiator_control(std::span<const double> xhat, double t, const GainVector& k, double g_hat,
                                      double u_prev, const plant::Reference& ref, const ControlLimits& limits) {
    const std::size_t n = k.size();
    if (xhat.size() != n + 1) throw std::invalid_argument("differentiator_control: xhat must have n+1 entries");
    // The uncertainty estimate uses the floored gain, like the division below.
    double g = g_hat;
    if (std::abs(g) < limits.gain_floor) g = g < 0.0 ? -limits.gain_floor : limits.gain_floor;
    const double f_hat = xhat[n] - g * u_prev;
    return tracking_law(f_hat, xhat, n, t, k, g_hat, ref, limits);
}

ControlCommand observer_control(std::span<const double> xhat, double t, const GainVector& k, double g_hat,
                                const plant::Reference& ref, const ControlLimits& limits) {
    const std::size_t n = k.size();
    if (xhat.size() != n + 1) throw std::invalid_argument("observer_control: xhat must have n+1 entries");
    return tracking_law(xhat[n], xhat, n, t, k, g_hat, ref, limits);
}

double slotine_error_bound(double phi, double lambda, std::size_t n, std::size_t i) {
    if (phi < 0.0 || !(lambda > 0.0) || i < 1 || i > n) {
        throw std::invalid_argument("slotine_error_bound: need phi >= 0, lambda > 0, 1 <= i <= n");
    }
    return std::pow(2.0, static_cast<double>(i - 1)) * phi / std::pow(lambda, static_cast<double>(n - i + 1));
}

double phi_diagnostic(double target, double xhat_last, std::span<const double> x, std::span<const double> xhat,
                      const GainVector& k, const BoundSet& bounds, PhiVariant variant) {
    const std::size_t n = k.size();
    if (x.size() < n || xhat.size() < n) throw std::invalid_argument("phi_diagnostic: dimension mismatch");
    double dist2 = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - xhat[i];
        dist2 += d * d;
        weighted += k.values()[i] * std::abs(d);
    }
    const double lip = variant == PhiVariant::observer ? bounds.l_1 * bounds.l_g / bounds.l_inf
                                                       : (bounds.l_1 / bounds.l_inf + bounds.l_u) * bounds.l_g;
    return std::abs(target - xhat_last) + lip * std::sqrt(dist2) + weighted;
}

BoundSet estimate_bounds(const plant::PlantModel& plant, const plant::Reference& ref, const GainVector& k,
                         double u_limit, const plant::OperatingDomain& domain, std::size_t points_per_axis) {
    const std::size_t n = plant.order();
    if (domain.lower.size() != n || domain.upper.size() != n || k.size() != n || points_per_axis < 2) {
        throw std::invalid_argument("estimate_bounds: dimension mismatch");
    }
    BoundSet b;
    b.l_u = u_limit;
    b.l_inf = plant.gain_bounds().l_inf;
    b.l_sup = plant.gain_bounds().l_sup;

    // Reference derivative magnitudes are amplitude * w^k.
    std::vector<double> ref_max(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        ref_max[i] = std::abs(ref.amplitude()) * std::pow(std::abs(ref.angular_freq()), static_cast<double>(i));
    }

    std::vector<double> step(n);
    for (std::size_t d = 0; d < n; ++d) step[d] = 1e-6 * std::max(1.0, domain.upper[d] - domain.lower[d]);

    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    std::vector<double> xp(n);
    std::vector<double> xdot(n);
    while (true) {
        for (std::size_t d = 0; d < n; ++d) {
            const double frac = static_cast<double>(idx[d]) / static_cast<double>(points_per_axis - 1);
            x[d] = domain.lower[d] + frac * (domain.upper[d] - domain.lower[d]);
        }
        const double f = plant.drift(x);

        double grad_g2 = 0.0;
        std::vector<double> grad_f(n);
        for (std::size_t d = 0; d < n; ++d) {
            xp = x;
            xp[d] = x[d] + step[d];
            const double gp = plant.input_gain(xp);
            const double fp = plant.drift(xp);
            xp[d] = x[d] - step[d];
            const double gm = plant.input_gain(xp);
            const double fm = plant.drift(xp);
            const double dg = (gp - gm) / (2.0 * step[d]);
            grad_g2 += dg * dg;
            grad_f[d] = (fp - fm) / (2.0 * step[d]);
        }
        b.l_g = std::max(b.l_g, std::sqrt(grad_g2));

        double ke = 0.0;
        for (std::size_t i = 0; i < n; ++i) ke += k.values()[i] * (std::abs(x[i]) + ref_max[i]);
        b.l_1 = std::max(b.l_1, std::abs(f) + ref_max[n] + ke);

        for (double u : {-u_limit, u_limit}) {
            plant.derivative(x, u, xdot);
            double h = 0.0;
            for (std::size_t d = 0; d < n; ++d) h += grad_f[d] * xdot[d];
            b.l_h = std::max(b.l_h, std::abs(h));
        }

        std::size_t d = 0;
        while (d < n && ++idx[d] == points_per_axis) idx[d++] = 0;
        if (d == n) break;
    }
    const double gain_spread = std::max(b.l_sup - b.l_inf, 1e-12) * u_limit;
    b.l_B = std::sqrt(gain_spread * gain_spread + b.l_h * b.l_h);
    return b;
}

}  // namespace obslab::control
