#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "obslab/numkit.hpp"

// High-gain estimators that reconstruct x_2..x_n and the lumped uncertainty
// from y = x_1 alone.
namespace obslab::estimators {

/// Order n, singular-perturbation parameter epsilon and gains a_1..a_{n+1}.
/// s^{n+1} + a_{n+1} s^n + ... + a_1 must be Hurwitz.
class EstimatorGains {
public:
    EstimatorGains(std::size_t order, double epsilon, std::vector<double> a);

    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return order_ + 1; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] std::span<const double> a() const noexcept { return a_; }

    /// a_i / epsilon^{n+2-i} for 1-based i, the coefficient of s^{i-1} in the
    /// characteristic polynomial of both estimators.
    [[nodiscard]] double scaled(std::size_t i) const;

    /// s^{n+1} + (a_{n+1}/eps) s^n + ... + a_1/eps^{n+1}
    [[nodiscard]] numkit::Polynomial characteristic() const;

    friend bool operator==(const EstimatorGains&, const EstimatorGains&) = default;

private:
    std::size_t order_;
    double epsilon_;
    std::vector<double> a_;
    std::vector<double> scaled_;
};

enum class EstimatorKind {
    integral_chain,       // correction enters only the last equation
    extended_observer,    // x_{n+1} = f(x) as an extra state, uses g(xhat) u
    classical_high_gain,  // correction in every equation, no input channel
};

/// (y, 0, ..., 0)
std::vector<double> initial_estimate(const EstimatorGains& g, double y0);

void differentiator_rhs(std::span<const double> xhat, double y, const EstimatorGains& g, std::span<double> dxhat);
std::vector<double> differentiator_rhs(std::span<const double> xhat, double y, const EstimatorGains& g);

void observer_rhs(std::span<const double> xhat, double y, double u, double g_hat, const EstimatorGains& g,
                  std::span<double> dxhat);
std::vector<double> observer_rhs(std::span<const double> xhat, double y, double u, double g_hat,
                                 const EstimatorGains& g);

/// The extended observer's linear part: observer_rhs with u = 0.
void high_gain_rhs(std::span<const double> xhat, double y, const EstimatorGains& g, std::span<double> dxhat);

/// fhat = xhat_{n+1} - g(xhat) u
double uncertainty_from_differentiator(double xhat_last, double g_hat, double u);

/// H_i(jw) = (a_1/eps^{n+1}) (jw)^{i-1} / D(jw), channel i in 1..n+1.
std::complex<double> freq_response(const EstimatorGains& g, std::size_t channel, double omega);

/// Linear estimator driven by y: xhat' = A xhat + L y.
struct StateSpace {
    numkit::Matrix a;
    std::vector<double> l;
};

StateSpace integral_chain_state_space(const EstimatorGains& g);
StateSpace high_gain_state_space(const EstimatorGains& g);

struct ChannelGains {
    double integral_chain = 0.0;
    double classical_high_gain = 0.0;
};

/// |H(jw)| of both structures on one channel, same (n, eps, a).
ChannelGains noise_channel_compare(const EstimatorGains& g, double omega, std::size_t channel);

struct ObserverErrorBoundInputs {
    double decay_rate = 0.0;          // lambda, 1/s
    double forcing_bound = 0.0;       // l_B
    double initial_error_norm = 0.0;  // ||z(0)||
    double epsilon = 0.0;
};

/// e^{-(lambda/eps) t} ||z(0)|| + (eps l_B / lambda)(1 - e^{-(lambda/eps) t})
double observer_error_bound(const ObserverErrorBoundInputs& in, double t);

/// Startup box applied to the estimates a controller sees while high-gain
/// peaking is likely (t < window_epsilons * eps).
struct PeakingClamp {
    double limit = 1e3;
    double window_epsilons = 10.0;

    [[nodiscard]] bool active(double t, double epsilon) const noexcept { return t < window_epsilons * epsilon; }
    void apply(double t, double epsilon, std::span<double> xhat) const;

    friend bool operator==(const PeakingClamp&, const PeakingClamp&) = default;
};

}  // namespace obslab::estimators
