#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "obslab/numkit.hpp"
#include "obslab/plant.hpp"

namespace obslab::control {

/// K = (k_1, ..., k_n) with s^n + k_n s^{n-1} + ... + k_1 Hurwitz.
class GainVector {
public:
    explicit GainVector(std::vector<double> k);

    [[nodiscard]] std::span<const double> values() const noexcept { return k_; }
    [[nodiscard]] std::size_t size() const noexcept { return k_.size(); }
    [[nodiscard]] numkit::Polynomial polynomial() const { return numkit::gain_polynomial(k_); }
    [[nodiscard]] numkit::Companion companion() const { return numkit::companion_from_gains(k_); }

    /// K^T e
    [[nodiscard]] double dot(std::span<const double> e) const;

    friend bool operator==(const GainVector&, const GainVector&) = default;

private:
    std::vector<double> k_;
};

struct BoundSet {
    double l_u = 50.0;  // control saturation
    double l_g = 0.0;   // Lipschitz constant of g
    double l_inf = 0.0;
    double l_sup = 0.0;
    double l_1 = 0.0;  // |fhat + y_d^(n) - K^T ehat| <= l_1
    double l_h = 0.0;  // |d f / dt| <= l_h
    double l_B = 0.0;  // observer error forcing bound

    void validate() const;
};

struct ControlLimits {
    double u_limit = 50.0;
    double gain_floor = 0.0;  // |g| is raised to at least this before division
};

/// 0.1 * l_inf, the default floor.
ControlLimits default_limits(const plant::GainBounds& bounds, double u_limit = 50.0);

struct ControlCommand {
    double u = 0.0;
    bool saturated = false;
    double g_hat_used = 0.0;
    bool gain_floored = false;
    double f_hat = 0.0;  // uncertainty estimate the law cancelled
};

double saturate(double u, double limit);

// Every law below is u = (1/g)[-fhat + y_d^(n) - K^T e]. The full-information
// law is sometimes printed with +Ke; under e_i = x_i - y_d^(i-1) only the minus
// sign yields e_n' + k_n e_n + ... + k_1 e_1 = 0.

ControlCommand full_state_control(std::span<const double> x, double t, const GainVector& k,
                                  const plant::PlantModel& plant, const plant::Reference& ref,
                                  const ControlLimits& limits);

/// Fuzzy/RBF baseline: fhat from the approximator, e from the true state.
ControlCommand adaptive_control(double f_hat, std::span<const double> x, double t, const GainVector& k, double g_eval,
                                const plant::Reference& ref, const ControlLimits& limits);

/// xhat has n+1 entries; fhat = xhat_{n+1} - g_hat * u_prev.
ControlCommand differentiator_control(std::span<const double> xhat, double t, const GainVector& k, double g_hat,
                                      double u_prev, const plant::Reference& ref, const ControlLimits& limits);

/// xhat has n+1 entries; xhat_{n+1} is used directly as fhat.
ControlCommand observer_control(std::span<const double> xhat, double t, const GainVector& k, double g_hat,
                                const plant::Reference& ref, const ControlLimits& limits);

/// |e_i| <= 2^{i-1} phi / lambda^{n-i+1}
double slotine_error_bound(double phi, double lambda, std::size_t n, std::size_t i);

enum class PhiVariant {
    observer,        // (l_1 l_g / l_inf) ||xhat - x||
    differentiator,  // (l_1 / l_inf + l_u) l_g ||xhat - x||
};

/// `target` is f(x) for the observer and x_n' for the differentiator.
double phi_diagnostic(double target, double xhat_last, std::span<const double> x, std::span<const double> xhat,
                      const GainVector& k, const BoundSet& bounds, PhiVariant variant = PhiVariant::observer);

/// Bound constants estimated on a grid over the operating domain.
BoundSet estimate_bounds(const plant::PlantModel& plant, const plant::Reference& ref, const GainVector& k,
                         double u_limit, const plant::OperatingDomain& domain = {}, std::size_t points_per_axis = 41);

}  // namespace obslab::control
