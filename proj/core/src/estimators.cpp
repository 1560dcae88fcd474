#include "obslab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace obslab::estimators {

namespace {

void require_dims(std::span<const double> xhat, std::span<double> out, const EstimatorGains& g) {
    if (xhat.size() != g.dimension() || out.size() != g.dimension()) {
        throw std::invalid_argument("estimator: state dimension must be order + 1");
    }
}

}  // namespace

EstimatorGains::EstimatorGains(std::size_t order, double epsilon, std::vector<double> a)
    : order_(order), epsilon_(epsilon), a_(std::move(a)) {
    if (order_ == 0) throw std::invalid_argument("EstimatorGains: order must be positive");
    if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw std::invalid_argument("EstimatorGains: epsilon must be positive");
    if (a_.size() != order_ + 1) throw std::invalid_argument("EstimatorGains: need order + 1 gains a_1..a_{n+1}");
    for (double v : a_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("EstimatorGains: gains must be positive");
    }
    if (!numkit::routh_hurwitz(numkit::gain_polynomial(a_))) {
        throw std::invalid_argument("EstimatorGains: s^{n+1} + a_{n+1} s^n + ... + a_1 is not Hurwitz");
    }
    scaled_.resize(a_.size());
    for (std::size_t i = 1; i <= a_.size(); ++i) {
        scaled_[i - 1] = a_[i - 1] / std::pow(epsilon_, static_cast<double>(order_ + 2 - i));
    }
}

double EstimatorGains::scaled(std::size_t i) const {
    if (i < 1 || i > scaled_.size()) throw std::out_of_range("EstimatorGains::scaled: index");
    return scaled_[i - 1];
}

numkit::Polynomial EstimatorGains::characteristic() const { return numkit::gain_polynomial(scaled_); }

std::vector<double> initial_estimate(const EstimatorGains& g, double y0) {
    std::vector<double> x(g.dimension(), 0.0);
    x[0] = y0;
    return x;
}

void differentiator_rhs(std::span<const double> xhat, double y, const EstimatorGains& g, std::span<double> dxhat) {
    require_dims(xhat, dxhat, g);
    const std::size_t m = g.dimension();
    double last = -g.scaled(1) * (xhat[0] - y);
    for (std::size_t i = 2; i <= m; ++i) last -= g.scaled(i) * xhat[i - 1];
    for (std::size_t i = 0; i + 1 < m; ++i) dxhat[i] = xhat[i + 1];
    dxhat[m - 1] = last;
}

std::vector<double> differentiator_rhs(std::span<const double> xhat, double y, const EstimatorGains& g) {
    std::vector<double> out(g.dimension());
    differentiator_rhs(xhat, y, g, out);
    return out;
}

void high_gain_rhs(std::span<const double> xhat, double y, const EstimatorGains& g, std::span<double> dxhat) {
    require_dims(xhat, dxhat, g);
    const std::size_t n = g.order();
    const double innov = xhat[0] - y;
    // Equation i (1-based) carries a_{n+2-i}/eps^i, which is scaled(n+2-i).
    for (std::size_t i = 1; i <= n; ++i) dxhat[i - 1] = xhat[i] - g.scaled(n + 2 - i) * innov;
    dxhat[n] = -g.scaled(1) * innov;
}

void observer_rhs(std::span<const double> xhat, double y, double u, double g_hat, const EstimatorGains& g,
                  std::span<double> dxhat) {
    high_gain_rhs(xhat, y, g, dxhat);
    dxhat[g.order() - 1] += g_hat * u;
}

std::vector<double> observer_rhs(std::span<const double> xhat, double y, double u, double g_hat,
                                 const EstimatorGains& g) {
    std::vector<double> out(g.dimension());
    observer_rhs(xhat, y, u, g_hat, g, out);
    return out;
}

double uncertainty_from_differentiator(double xhat_last, double g_hat, double u) { return xhat_last - g_hat * u; }

std::complex<double> freq_response(const EstimatorGains& g, std::size_t channel, double omega) {
    if (channel < 1 || channel > g.dimension()) throw std::invalid_argument("freq_response: channel out of range");
    const std::complex<double> s(0.0, omega);
    const auto den = g.characteristic()(s);
    return g.scaled(1) * std::pow(s, static_cast<int>(channel - 1)) / den;
}

StateSpace integral_chain_state_space(const EstimatorGains& g) {
    const std::size_t m = g.dimension();
    StateSpace ss{numkit::Matrix(m, m), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i + 1 < m; ++i) ss.a(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < m; ++j) ss.a(m - 1, j) = -g.scaled(j + 1);
    ss.l[m - 1] = g.scaled(1);
    return ss;
}

StateSpace high_gain_state_space(const EstimatorGains& g) {
    const std::size_t m = g.dimension();
    const std::size_t n = g.order();
    StateSpace ss{numkit::Matrix(m, m), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i + 1 < m; ++i) ss.a(i, i + 1) = 1.0;
    for (std::size_t i = 1; i <= m; ++i) {
        const double c = g.scaled(n + 2 - i);
        ss.a(i - 1, 0) = -c;
        ss.l[i - 1] = c;
    }
    return ss;
}

ChannelGains noise_channel_compare(const EstimatorGains& g, double omega, std::size_t channel) {
    const auto ic = integral_chain_state_space(g);
    const auto hg = high_gain_state_space(g);
    return ChannelGains{std::abs(numkit::observer_noise_tf(ic.a, ic.l, channel, omega)),
                        std::abs(numkit::observer_noise_tf(hg.a, hg.l, channel, omega))};
}

double observer_error_bound(const ObserverErrorBoundInputs& in, double t) {
    if (!(in.decay_rate > 0.0) || !(in.epsilon > 0.0) || in.forcing_bound < 0.0 || in.initial_error_norm < 0.0) {
        throw std::invalid_argument("observer_error_bound: inputs must be positive");
    }
    const double decay = std::exp(-(in.decay_rate / in.epsilon) * t);
    return decay * in.initial_error_norm + (in.epsilon * in.forcing_bound / in.decay_rate) * (1.0 - decay);
}

void PeakingClamp::apply(double t, double epsilon, std::span<double> xhat) const {
    if (!active(t, epsilon)) return;
    for (auto& v : xhat) v = std::clamp(v, -limit, limit);
}

}  // namespace obslab::estimators
