#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "obslab/errors.hpp"
#include "obslab/plant.hpp"
#include "obslab/simkit.hpp"

using namespace obslab::simkit;
using obslab::SimTrace;
using std::numbers::pi;

namespace {

Scenario open_loop(double h, double t_end, double x1 = 0.5) {
    Scenario s;
    s.name = "open";
    s.estimator.reset();
    s.controller.kind = ControllerKind::open_loop;
    s.initial_state = {x1, 0.0};
    s.sim.step = h;
    s.sim.t_end = t_end;
    s.sim.decimation = 1;
    return s;
}

Scenario short_fig5(double t_end = 1.0) {
    Scenario s;
    s.name = "fig5-short";
    s.sim.t_end = t_end;
    return s;
}

std::vector<double> final_state(const SimTrace& tr) {
    const std::size_t last = tr.rows() - 1;
    return {tr.at(last, "x1"), tr.at(last, "x2")};
}

}  // namespace

TEST_SUITE("simkit") {

TEST_CASE("rk4 examples") {
    const std::vector<double> c{3.5};
    CHECK(rk4_step([](double, std::span<const double>, std::span<double> d) { d[0] = 0.0; }, 0.0, c, 0.1)[0] == 3.5);
    const std::vector<double> one{1.0};
    const auto e = rk4_step([](double, std::span<const double> x, std::span<double> d) { d[0] = -x[0]; }, 0.0, one, 0.1);
    const double hand = 1.0 + 0.1 / 6.0 * (-1.0 + 2.0 * -0.95 + 2.0 * -0.9525 + -0.90475);
    CHECK(e[0] == doctest::Approx(hand).epsilon(1e-15));
    CHECK(e[0] == doctest::Approx(0.9048375).epsilon(1e-7));
    const std::vector<double> zero{0.0};
    CHECK(rk4_step([](double, std::span<const double>, std::span<double> d) { d[0] = 1.0; }, 0.0, zero, 0.1)[0] ==
          doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("rk4 reports divergence with the stage time") {
    const Rhs blowup = [](double t, std::span<const double>, std::span<double> d) { d[0] = t > 0.26 ? NAN : 1.0; };
    const std::vector<double> x{0.0};
    try {
        rk4_step(blowup, 0.2, x, 0.1);
        FAIL("expected divergence");
    } catch (const obslab::IntegrationDivergedError& err) {
        CHECK(err.time() == doctest::Approx(0.3));
        CHECK(std::string(err.what()).find("0.3") != std::string::npos);
    }
}

TEST_CASE("noise source") {
    NoiseSource silent(0.0, 9);
    for (int i = 0; i < 100; ++i) CHECK(silent.sample() == 0.0);
    CHECK_THROWS_AS(NoiseSource(-1.0, 1), std::invalid_argument);

    NoiseSource a(0.01, 42), b(0.01, 42);
    for (int i = 0; i < 100; ++i) CHECK(a.sample() == b.sample());

    NoiseSource n(0.01, 7);
    constexpr int count = 1'000'000;
    double sum = 0.0, peak = 0.0;
    for (int i = 0; i < count; ++i) {
        const double v = n.sample();
        sum += v;
        peak = std::max(peak, std::abs(v));
    }
    CHECK(peak <= 0.01);
    const double sigma = 0.01 / std::sqrt(3.0);
    CHECK(std::abs(sum / count) <= 3.0 * sigma / std::sqrt(static_cast<double>(count)));

    NoiseSource parent(1.0, 3);
    auto child = parent.split();
    NoiseSource again(1.0, 3);
    auto child2 = again.split();
    CHECK(child.sample() == child2.sample());
    CHECK(child.sample() != parent.sample());
}

TEST_CASE("stability step bound") {
    const std::vector<double> a{10, 10, 10};
    const double b = stability_step_bound(0.01, a);
    const double largest = std::abs(obslab::numkit::roots(obslab::numkit::gain_polynomial(a))[0]);
    CHECK(b == doctest::Approx(2.8e-3).epsilon(0.02));
    // the cubic s^3 + 10 s^2 + 10 s + 10 has its real root at -9.0137
    const double r = 2.5 * 0.01 / b;
    CHECK(r == doctest::Approx(9.0137).epsilon(1e-4));
    CHECK(std::abs(-r * r * r + 10.0 * r * r - 10.0 * r + 10.0) < 1e-9);
    CHECK(largest > 0.0);
    CHECK(stability_step_bound(0.005, a) == doctest::Approx(0.5 * b).epsilon(1e-14));
    CHECK(stability_step_bound(0.02, std::vector<double>{1.0}) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK_THROWS_AS(stability_step_bound(0.0, a), std::invalid_argument);
}

TEST_CASE("scenario validation") {
    Scenario s;
    CHECK_NOTHROW(s.validate());
    s.sim.step = 5e-3;  // above the ~2.8e-3 bound for eps = 0.01
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = Scenario{};
    s.sim.t_end = 1e5;
    s.sim.step = 1e-4;
    CHECK_THROWS_AS(s.validate(), obslab::BudgetExceededError);
    s = Scenario{};
    s.estimator.reset();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // differentiator needs an estimator
    s = Scenario{};
    s.controller.kind = ControllerKind::observer;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // needs the extended observer
    s = Scenario{};
    s.controller.kind = ControllerKind::adaptive;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // needs an approximator
}

TEST_CASE("zero-duration scenario keeps the initial conditions") {
    auto s = short_fig5();
    s.sim.t_end = s.sim.step;
    const auto tr = run_closed_loop(s);
    REQUIRE(tr.rows() == 2);
    CHECK(tr.at(0, "t") == 0.0);
    CHECK(tr.at(1, "t") == s.sim.step);
    CHECK(tr.at(0, "x1") == s.initial_state[0]);
    CHECK(tr.at(0, "x2") == s.initial_state[1]);
    CHECK(tr.at(0, "xhat1") == s.initial_state[0]);
    CHECK(tr.at(0, "xhat2") == 0.0);
}

TEST_CASE("trace layout") {
    const auto s = short_fig5(0.5);
    const auto tr = run_closed_loop(s);
    CHECK(tr.names() == trace_columns(s));
    const auto t = tr.column("t");
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
    CHECK(t.back() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tr.rows() == 5000 / 10 + 1);
}

TEST_CASE("estimation error columns are exact differences") {
    auto s = short_fig5(0.5);
    s.noise = NoiseConfig{0.01, 5};
    const auto tr = run_closed_loop(s);
    const obslab::plant::PendulumParams p;
    for (std::size_t r = 0; r < tr.rows(); ++r) {
        CHECK(tr.at(r, "z1") == tr.at(r, "xhat1") - tr.at(r, "x1"));
        CHECK(tr.at(r, "z2") == tr.at(r, "xhat2") - tr.at(r, "x2"));
        const std::vector<double> x{tr.at(r, "x1"), tr.at(r, "x2")};
        const double target = tr.at(r, "f") + obslab::plant::pendulum_input_gain(x, p) * tr.at(r, "u");
        CHECK(tr.at(r, "z3") == tr.at(r, "xhat3") - target);
        CHECK(tr.at(r, "y") == tr.at(r, "x1") + tr.at(r, "noise"));
    }
}

TEST_CASE("determinism") {
    auto s = short_fig5(0.5);
    s.noise = NoiseConfig{0.01, 11};
    CHECK(run_closed_loop(s) == run_closed_loop(s));
    auto other = s;
    other.noise->seed = 12;
    CHECK_FALSE(run_closed_loop(s) == run_closed_loop(other));
}

TEST_CASE("zero-amplitude noise equals no noise") {
    auto quiet = short_fig5(0.5);
    auto zero = quiet;
    zero.noise = NoiseConfig{0.0, 99};
    CHECK(run_closed_loop(quiet) == run_closed_loop(zero));
}

TEST_CASE("control is held across each step") {
    auto s = open_loop(1e-3, 1.0, pi / 60.0);
    s.controller.kind = ControllerKind::full_state;
    const auto tr = run_closed_loop(s);
    const obslab::plant::PendulumParams p;
    std::vector<double> x{s.initial_state};
    Rk4 rk;
    for (std::size_t r = 0; r + 1 < tr.rows(); ++r) {
        const double u = tr.at(r, "u");
        rk.step([&](double, std::span<const double> st, std::span<double> d) {
            const auto v = obslab::plant::pendulum_dynamics(st, u, p);
            d[0] = v[0];
            d[1] = v[1];
        }, tr.at(r, "t"), x, s.sim.step);
        CHECK(x[0] == doctest::Approx(tr.at(r + 1, "x1")).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(tr.at(r + 1, "x2")).epsilon(1e-14));
    }
}

TEST_CASE("step halving shows fourth-order convergence") {
    const auto a = final_state(run_closed_loop(open_loop(4e-3, 1.0)));
    const auto b = final_state(run_closed_loop(open_loop(2e-3, 1.0)));
    const auto c = final_state(run_closed_loop(open_loop(1e-3, 1.0)));
    const double d1 = std::hypot(a[0] - b[0], a[1] - b[1]);
    const double d2 = std::hypot(b[0] - c[0], b[1] - c[1]);
    CAPTURE(d1);
    CAPTURE(d2);
    CHECK(std::log2(d1 / d2) >= 3.5);
}

TEST_CASE("unforced pendulum conserves its energy") {
    // Cart-pole with zero total momentum: the angle subsystem conserves
    // 1/2 m l^2 x2^2 (4/3 - m cos^2 x1 / (mc + m)) + m g l cos x1.
    const obslab::plant::PendulumParams p;
    auto energy = [&p](double x1, double x2) {
        const double c = std::cos(x1);
        const double total = p.cart_mass + p.pendulum_mass;
        return 0.5 * p.pendulum_mass * p.half_length * p.half_length * x2 * x2 *
                   (4.0 / 3.0 - p.pendulum_mass * c * c / total) +
               p.pendulum_mass * p.gravity * p.half_length * c;
    };
    auto s = open_loop(1e-4, 10.0, pi / 60.0);
    s.sim.decimation = 100;
    const auto tr = run_closed_loop(s);
    const double e0 = energy(tr.at(0, "x1"), tr.at(0, "x2"));
    double worst = 0.0, peak_rate = 0.0;
    for (std::size_t r = 0; r < tr.rows(); ++r) {
        worst = std::max(worst, std::abs(energy(tr.at(r, "x1"), tr.at(r, "x2")) - e0));
        peak_rate = std::max(peak_rate, std::abs(tr.at(r, "x2")));
    }
    CHECK(worst <= 1e-9 * std::abs(e0));
    CHECK(peak_rate < 15.0);
}

TEST_CASE("full-state tracking converges") {
    auto s = open_loop(1e-4, 5.0, pi / 60.0);
    s.controller.kind = ControllerKind::full_state;
    s.sim.decimation = 10;
    const auto tr = run_closed_loop(s);
    CHECK(std::abs(tr.at(tr.rows() - 1, "e1")) < 1e-3);
    CHECK(std::abs(tr.at(tr.rows() - 1, "e2")) < 1e-3);
}

TEST_CASE("adaptive parameters stay bounded") {
    for (auto kind : {ApproximatorKind::fuzzy, ApproximatorKind::rbf}) {
        auto s = open_loop(1e-3, 10.0, pi / 60.0);
        s.controller.kind = ControllerKind::adaptive;
        s.approximator = ApproximatorConfig{};
        s.approximator->kind = kind;
        if (kind == ApproximatorKind::rbf) s.approximator->initial_value = 0.0;
        s.sim.decimation = 10;
        const auto tr = run_closed_loop(s);
        double peak = 0.0;
        for (const auto& name : tr.names()) {
            if (name.rfind("theta", 0) == 0 || name.rfind("w", 0) == 0) {
                for (double v : tr.column(name)) peak = std::max(peak, std::abs(v));
            }
        }
        CHECK(std::isfinite(peak));
        CHECK(peak < 1e3);
    }
}

}  // TEST_SUITE
