#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "generators.hpp"
#include "obslab/control.hpp"
#include "obslab/plant.hpp"

using namespace obslab::control;
using obslab::plant::Reference;
using obslab::testing::Gen;
using std::numbers::pi;

namespace {

const GainVector kK({20.0, 10.0});

ControlLimits loose() { return ControlLimits{1e12, 0.0}; }

}  // namespace

TEST_SUITE("control") {

TEST_CASE("GainVector validation") {
    CHECK_THROWS_AS(GainVector({}), std::invalid_argument);
    CHECK_THROWS_AS(GainVector({-1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(GainVector({10.0, 1.0, 1.0}), std::invalid_argument);
    CHECK(kK.dot(std::vector<double>{1.0, 2.0}) == 40.0);
}

TEST_CASE("full_state_control examples") {
    // linear plant x'' = u: f = 0, g = 1
    const obslab::plant::PlantModel linear(
        2, [](std::span<const double>) { return 0.0; }, [](std::span<const double>) { return 1.0; }, {1.0, 1.0});
    const Reference flat(0.0, 1.0);
    const std::vector<double> origin{0.0, 0.0};
    CHECK(full_state_control(origin, 3.0, kK, linear, flat, loose()).u == 0.0);

    const obslab::plant::PendulumParams p;
    const auto pend = obslab::plant::make_pendulum(p);
    const Reference ref;
    const std::vector<double> x{pi / 6.0, 0.0};
    const double f = obslab::plant::pendulum_drift(x, p);
    const double g = obslab::plant::pendulum_input_gain(x, p);
    const double e1 = pi / 6.0, e2 = -0.1 * pi;
    const double hand = (-f + 0.0 - (20.0 * e1 + 10.0 * e2)) / g;
    const auto cmd = full_state_control(x, 0.0, kK, pend, ref, loose());
    CHECK(f == doctest::Approx(7.7461).epsilon(1e-5));
    CHECK(cmd.u == doctest::Approx(hand).epsilon(1e-14));
    CHECK(cmd.f_hat == f);
    CHECK_FALSE(cmd.saturated);
}

TEST_CASE("adaptive_control examples") {
    const Reference ref;
    // t = 1: y_d'' = -0.1 pi^2 sin(pi) = 0 up to rounding
    const std::vector<double> on_ref{ref.derivative(1.0, 0), ref.derivative(1.0, 1)};
    const auto a = adaptive_control(3.0, on_ref, 1.0, kK, 1.5, ref, loose());
    CHECK(a.u == doctest::Approx(-2.0).epsilon(1e-12));
    const std::vector<double> start{0.0, 0.1 * pi};
    CHECK(adaptive_control(0.0, start, 0.0, kK, 1.5, ref, loose()).u == 0.0);
}

TEST_CASE("differentiator_control examples") {
    const Reference ref;
    const std::vector<double> xhat{0.0, 0.1 * pi, 1.4 * 0.7};
    const auto c = differentiator_control(xhat, 0.0, kK, 1.4, 0.7, ref, loose());
    CHECK(c.u == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(c.u) < 1e-15);

    const ControlLimits tight{5.0, 0.0};
    const std::vector<double> far{1.0, 0.0, 0.0};
    const auto s = differentiator_control(far, 0.0, kK, 1.4, 0.0, ref, tight);
    CHECK(s.saturated);
    CHECK(std::abs(s.u) == 5.0);
    CHECK_THROWS_AS(differentiator_control(std::vector<double>{1.0, 0.0}, 0.0, kK, 1.4, 0.0, ref, tight),
                    std::invalid_argument);
}

TEST_CASE("observer_control examples") {
    const Reference ref;
    const std::vector<double> xhat{0.0, 0.1 * pi, 0.0};
    CHECK(observer_control(xhat, 0.0, kK, 1.4, ref, loose()).u == 0.0);

    // near x1 = pi/2 the input gain collapses and is floored
    const obslab::plant::PendulumParams p;
    const auto model = obslab::plant::make_pendulum(p);
    const auto limits = default_limits(model.gain_bounds());
    const std::vector<double> tipped{pi / 2.0 - 1e-4, 0.0, 1.0};
    const double g_hat = obslab::plant::pendulum_input_gain(tipped, p);
    const auto cmd = observer_control(tipped, 0.0, kK, g_hat, ref, limits);
    CHECK(cmd.gain_floored);
    CHECK(cmd.g_hat_used == doctest::Approx(0.1 * model.gain_bounds().l_inf));
    const double raw = (-1.0 - (20.0 * (pi / 2.0 - 1e-4) + 10.0 * (-0.1 * pi))) / cmd.g_hat_used;
    CHECK(cmd.u == doctest::Approx(saturate(raw, 50.0)));
}

TEST_CASE("controllers agree under perfect estimates") {
    const obslab::plant::PendulumParams p;
    const auto model = obslab::plant::make_pendulum(p);
    const Reference ref;
    const auto limits = default_limits(model.gain_bounds());
    Gen gen(51);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{gen.uniform(-pi / 3.0, pi / 3.0), gen.uniform(-5.0, 5.0)};
        const double t = gen.uniform(0.0, 10.0);
        const double u_prev = gen.uniform(-50.0, 50.0);
        const double f = model.drift(x);
        const double g = model.input_gain(x);
        const auto full = full_state_control(x, t, kK, model, ref, limits);
        const std::vector<double> diff{x[0], x[1], f + g * u_prev};
        const std::vector<double> obs{x[0], x[1], f};
        CHECK(std::abs(differentiator_control(diff, t, kK, g, u_prev, ref, limits).u - full.u) < 1e-10);
        CHECK(std::abs(observer_control(obs, t, kK, g, ref, limits).u - full.u) < 1e-10);
    }
}

TEST_CASE("saturation is idempotent and bounded") {
    Gen gen(52);
    for (int i = 0; i < 1000; ++i) {
        const double u = gen.uniform(-1e3, 1e3);
        const double l = gen.uniform(0.1, 100.0);
        const double s = saturate(u, l);
        CHECK(std::abs(s) <= l);
        CHECK(saturate(s, l) == s);
        if (std::abs(u) <= l) CHECK(s == u);
    }
}

TEST_CASE("slotine_error_bound examples") {
    const double lambda = obslab::numkit::min_decay_rate(kK.polynomial());
    CHECK(lambda == doctest::Approx(2.7639).epsilon(1e-4));
    for (std::size_t i = 1; i <= 2; ++i) CHECK(slotine_error_bound(0.0, lambda, 2, i) == 0.0);
    CHECK(slotine_error_bound(0.1, 2.7639, 2, 1) == doctest::Approx(0.013093).epsilon(1e-4));
    CHECK(slotine_error_bound(0.1, 2.7639, 2, 2) == doctest::Approx(0.072362).epsilon(1e-4));
    CHECK_THROWS_AS(slotine_error_bound(0.1, 0.0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(slotine_error_bound(0.1, 1.0, 2, 3), std::invalid_argument);
}

TEST_CASE("phi_diagnostic examples") {
    BoundSet unit;
    unit.l_1 = unit.l_g = unit.l_inf = unit.l_sup = 1.0;
    const std::vector<double> x{0.3, -0.2};
    CHECK(phi_diagnostic(1.5, 1.5, x, x, kK, unit) == 0.0);
    CHECK(phi_diagnostic(1.6, 1.5, x, x, kK, unit) == doctest::Approx(0.1));
    const std::vector<double> xhat{0.29, -0.22};
    CHECK(phi_diagnostic(1.5, 1.5, x, xhat, kK, unit) == doctest::Approx(0.42236).epsilon(1e-5));

    // the differentiator variant adds l_u to the Lipschitz factor
    unit.l_u = 2.0;
    const double d = std::sqrt(0.0005);
    CHECK(phi_diagnostic(1.5, 1.5, x, xhat, kK, unit, PhiVariant::differentiator) ==
          doctest::Approx(3.0 * d + 0.4).epsilon(1e-12));
}

TEST_CASE("estimate_bounds on the pendulum") {
    const auto model = obslab::plant::make_pendulum({});
    const auto b = estimate_bounds(model, Reference(), kK, 50.0);
    CHECK_NOTHROW(b.validate());
    CHECK(b.l_u == 50.0);
    CHECK(b.l_inf == model.gain_bounds().l_inf);
    // f at the domain corner enters l_1
    const std::vector<double> corner{pi / 3.0, 5.0};
    CHECK(b.l_1 >= std::abs(model.drift(corner)));
}

}  // TEST_SUITE
