#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "generators.hpp"
#include "obslab/plant.hpp"

using namespace obslab::plant;
using obslab::testing::Gen;
using std::numbers::pi;

TEST_SUITE("plant") {

TEST_CASE("pendulum_dynamics examples") {
    const PendulumParams p;
    const std::vector<double> rest{0.0, 0.0};
    const auto d0 = pendulum_dynamics(rest, 0.0, p);
    CHECK(d0[0] == 0.0);
    CHECK(d0[1] == 0.0);

    const std::vector<double> tilted{pi / 6.0, 0.0};
    const auto d1 = pendulum_dynamics(tilted, 0.0, p);
    CHECK(d1[0] == 0.0);
    const double f_hand = 9.8 * 0.5 / (0.5 * (4.0 / 3.0 - 0.1 * 0.75 / 1.1));
    CHECK(d1[1] == doctest::Approx(f_hand).epsilon(1e-14));
    CHECK(d1[1] == doctest::Approx(7.7461).epsilon(1e-5));

    const double g_hand = (1.0 / 1.1) / (0.5 * (4.0 / 3.0 - 0.1 / 1.1));
    CHECK(pendulum_input_gain(rest, p) == doctest::Approx(g_hand).epsilon(1e-14));
    CHECK(pendulum_input_gain(rest, p) == doctest::Approx(1.4634).epsilon(1e-4));
}

TEST_CASE("pendulum_dynamics combines drift and input gain") {
    const PendulumParams p;
    Gen gen(21);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{gen.uniform(-1.0, 1.0), gen.uniform(-5.0, 5.0)};
        const double u = gen.uniform(-50.0, 50.0);
        const auto d = pendulum_dynamics(x, u, p);
        CHECK(d[0] == x[1]);
        CHECK(d[1] == doctest::Approx(pendulum_drift(x, p) + pendulum_input_gain(x, p) * u));
    }
}

TEST_CASE("pendulum_dynamics rejects non-finite input") {
    const PendulumParams p;
    const std::vector<double> bad{NAN, 0.0};
    const std::vector<double> ok{0.0, 0.0};
    CHECK_THROWS_AS(pendulum_dynamics(bad, 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(pendulum_dynamics(ok, INFINITY, p), std::invalid_argument);
}

TEST_CASE("drift is odd in the state") {
    const PendulumParams p;
    Gen gen(22);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{gen.uniform(-pi / 3.0, pi / 3.0), gen.uniform(-5.0, 5.0)};
        const std::vector<double> mx{-x[0], -x[1]};
        CHECK(pendulum_drift(mx, p) == doctest::Approx(-pendulum_drift(x, p)).epsilon(1e-13));
        // and the input gain is even, so the full right-hand side is odd in (x, u)
        const double u = gen.uniform(-10.0, 10.0);
        CHECK(pendulum_dynamics(mx, -u, p)[1] == doctest::Approx(-pendulum_dynamics(x, u, p)[1]).epsilon(1e-12));
    }
}

TEST_CASE("input gain is bounded away from zero on the operating domain") {
    const PendulumParams p;
    const auto model = make_pendulum(p);
    const auto b = model.gain_bounds();
    CHECK(b.l_inf > 0.0);
    CHECK(b.l_inf <= b.l_sup);
    // g is largest upright and smallest at the domain edge x1 = pi/3
    const std::vector<double> up{0.0, 0.0}, edge{pi / 3.0, 0.0};
    CHECK(b.l_sup == doctest::Approx(pendulum_input_gain(up, p)));
    CHECK(b.l_inf == doctest::Approx(pendulum_input_gain(edge, p)));
    Gen gen(23);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{gen.uniform(-pi / 3.0, pi / 3.0), gen.uniform(-5.0, 5.0)};
        const double g = model.input_gain(x);
        CHECK(g >= b.l_inf - 1e-12);
        CHECK(g <= b.l_sup + 1e-12);
    }
}

TEST_CASE("params validation") {
    PendulumParams p;
    CHECK_NOTHROW(p.validate());
    p.half_length = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.cart_mass = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.gravity = NAN;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("PlantModel derivative") {
    const auto model = make_pendulum({});
    CHECK(model.order() == 2);
    const std::vector<double> x{0.2, -1.0};
    std::vector<double> dx(2);
    model.derivative(x, 3.0, dx);
    const auto ref = pendulum_dynamics(x, 3.0, {});
    CHECK(dx[0] == ref[0]);
    CHECK(dx[1] == ref[1]);
}

TEST_CASE("reference examples") {
    const Reference r;
    CHECK(r.derivative(0.0, 0) == 0.0);
    CHECK(r.derivative(0.0, 1) == doctest::Approx(0.1 * pi).epsilon(1e-15));
    CHECK(r.derivative(0.5, 2) == doctest::Approx(-0.1 * pi * pi).epsilon(1e-15));
    const auto d = r.derivatives(0.25, 3);
    REQUIRE(d.size() == 3);
    CHECK(d[1] == r.derivative(0.25, 1));
}

TEST_CASE("reference derivatives satisfy the chain relation") {
    const Reference r(0.3, 2.0);
    Gen gen(24);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const double t = gen.uniform(0.0, 10.0);
        for (std::size_t k = 0; k < 4; ++k) {
            const double fd = (r.derivative(t + h, k) - r.derivative(t - h, k)) / (2.0 * h);
            CHECK(std::abs(fd - r.derivative(t, k + 1)) < 1e-6);
        }
    }
}

TEST_CASE("tracking_error examples") {
    const Reference r;
    Gen gen(25);
    for (int i = 0; i < 20; ++i) {
        const double t = gen.uniform(0.0, 10.0);
        const std::vector<double> x{r.derivative(t, 0), r.derivative(t, 1)};
        const auto e = tracking_error(x, t, r);
        CHECK(e[0] == 0.0);
        CHECK(e[1] == 0.0);
    }
    const std::vector<double> x1{0.1, 0.0};
    const auto e1 = tracking_error(x1, 0.0, r);
    CHECK(e1[0] == doctest::Approx(0.1));
    CHECK(e1[1] == doctest::Approx(-0.1 * pi));

    const std::vector<double> x0{pi / 60.0, 0.0};
    const auto e0 = tracking_error(x0, 0.0, r);
    CHECK(e0[0] == doctest::Approx(pi / 60.0));
    CHECK(e0[1] == doctest::Approx(-0.1 * pi));
}

}  // TEST_SUITE
