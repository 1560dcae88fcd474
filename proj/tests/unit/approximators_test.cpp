#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "generators.hpp"
#include "obslab/approximators.hpp"
#include "obslab/errors.hpp"
#include "obslab/numkit.hpp"

using namespace obslab::approximators;
using obslab::numkit::Matrix;
using obslab::testing::Gen;
using std::numbers::pi;

namespace {

Matrix hand_p() { return Matrix::from_rows({{1.3, 0.025}, {0.025, 0.0525}}); }

}  // namespace

TEST_SUITE("approximators") {

TEST_CASE("membership_eval examples") {
    const auto grid = MembershipGrid::five_set(1);
    CHECK(grid.count(0) == 5);
    CHECK(membership_eval(0.0, grid, 0, 2) == 1.0);
    CHECK(membership_eval(pi / 12.0, grid, 0, 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(membership_eval(0.0, grid, 0, 0) == doctest::Approx(std::exp(-16.0)).epsilon(1e-12));
    CHECK(membership_eval(0.0, grid, 0, 0) == doctest::Approx(1.1254e-7).epsilon(1e-4));
}

TEST_CASE("fuzzy_basis examples") {
    const auto flat = MembershipGrid::uniform(1, {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
    const std::vector<double> x{0.3};
    for (double v : fuzzy_basis(x, flat)) CHECK(v == doctest::Approx(0.25));

    const auto grid2 = MembershipGrid::five_set(2);
    CHECK(grid2.rule_count() == 25);
    const std::vector<double> x2{0.1, -0.1};
    CHECK(fuzzy_basis(x2, grid2).size() == 25);

    const auto grid1 = MembershipGrid::five_set(1);
    const std::vector<double> zero{0.0};
    const auto xi = fuzzy_basis(zero, grid1);
    const double hand = 1.0 / (1.0 + 2.0 * std::exp(-4.0) + 2.0 * std::exp(-16.0));
    CHECK(xi[2] == doctest::Approx(hand).epsilon(1e-14));
    CHECK(xi[2] == doctest::Approx(0.96466).epsilon(1e-5));
}

TEST_CASE("fuzzy_basis rule order has the last input varying fastest") {
    const auto grid = MembershipGrid::five_set(2);
    const std::vector<double> x{-pi / 6.0, pi / 6.0};
    const auto xi = fuzzy_basis(x, grid);
    const auto top = std::max_element(xi.begin(), xi.end()) - xi.begin();
    CHECK(top == 0 * 5 + 4);
}

TEST_CASE("fuzzy_basis underflow is reported") {
    const auto grid = MembershipGrid::five_set(2);
    const std::vector<double> far{100.0, 0.0};
    CHECK_THROWS_AS(fuzzy_basis(far, grid), obslab::DegenerateInputError);
    const std::vector<double> wrong{0.0};
    CHECK_THROWS_AS(fuzzy_basis(wrong, grid), std::invalid_argument);
}

TEST_CASE("fuzzy_basis is normalized") {
    Gen gen(41);
    const auto grid = MembershipGrid::five_set(2);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{gen.uniform(-pi / 3.0, pi / 3.0), gen.uniform(-pi / 3.0, pi / 3.0)};
        const auto xi = fuzzy_basis(x, grid);
        const double sum = std::accumulate(xi.begin(), xi.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (double v : xi) CHECK(v >= 0.0);
    }
}

TEST_CASE("permuting the sets permutes the basis and leaves the output unchanged") {
    Gen gen(42);
    auto sets = MembershipGrid::five_set(1).sets(0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> perm(sets.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen.engine());
        std::vector<Gaussian> permuted;
        for (auto p : perm) permuted.push_back(sets[p]);

        const auto a = MembershipGrid::uniform(2, sets);
        const auto b = MembershipGrid::uniform(2, permuted);
        const std::vector<double> x{gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
        const auto xa = fuzzy_basis(x, a);
        const auto xb = fuzzy_basis(x, b);
        const auto theta = gen.vector(25, -3.0, 3.0);
        std::vector<double> theta_b(25);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                const std::size_t rule_b = i * 5 + j;
                const std::size_t rule_a = perm[i] * 5 + perm[j];
                CHECK(xb[rule_b] == doctest::Approx(xa[rule_a]).epsilon(1e-14));
                theta_b[rule_b] = theta[rule_a];
            }
        }
        CHECK(fuzzy_output(theta_b, xb) == doctest::Approx(fuzzy_output(theta, xa)).epsilon(1e-13));
    }
}

TEST_CASE("fuzzy_output examples") {
    Gen gen(43);
    const auto grid = MembershipGrid::five_set(2);
    const std::vector<double> x{0.2, -0.4};
    const auto xi = fuzzy_basis(x, grid);
    CHECK(fuzzy_output(std::vector<double>(25, 1.7), xi) == doctest::Approx(1.7).epsilon(1e-14));
    std::vector<double> hot(25, 0.0);
    hot[7] = 1.0;
    CHECK(fuzzy_output(hot, xi) == xi[7]);
    CHECK(fuzzy_output(std::vector<double>{1, 2, 3}, std::vector<double>{0.5, 0.25, 0.25}) == 1.75);
    CHECK_THROWS_AS(fuzzy_output(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("adaptive laws") {
    const auto p = hand_p();
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> xi{0.6, 0.4};
    for (double v : fuzzy_adapt_rhs(zero, p, xi, 100.0)) CHECK(v == 0.0);

    // e^T P b = 0.05 with P = I and e = (0, 0.05)
    const std::vector<double> e05{0.0, 0.05};
    const auto d = fuzzy_adapt_rhs(e05, Matrix::identity(2), std::vector<double>{1.0, 0.0}, 100.0);
    CHECK(d[0] == doctest::Approx(-5.0));
    CHECK(d[1] == 0.0);

    const std::vector<double> e1{1.0, 0.0};
    CHECK(error_weight(e1, p) == doctest::Approx(0.025));
    const auto df = fuzzy_adapt_rhs(e1, p, xi, 100.0);
    const auto dr = rbf_adapt_rhs(e1, p, xi, 100.0);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        CHECK(df[i] == doctest::Approx(-2.5 * xi[i]));
        CHECK(dr[i] == doctest::Approx(-2.5 * xi[i]));
    }
    for (double v : rbf_adapt_rhs(zero, p, xi, 100.0)) CHECK(v == 0.0);
    CHECK_THROWS_AS(fuzzy_adapt_rhs(std::vector<double>{1.0}, p, xi, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(rbf_adapt_rhs(std::vector<double>{1.0, 0.0, 0.0}, p, xi, 100.0), std::invalid_argument);
}

TEST_CASE("rbf_gaussian examples") {
    const std::vector<double> c{0.1, -0.2};
    CHECK(rbf_gaussian(c, c, 0.3) == 1.0);
    const std::vector<double> x{0.1 + 0.3 * 0.6, -0.2 + 0.3 * 0.8};
    CHECK(rbf_gaussian(x, c, 0.3) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    const std::vector<double> x2{0.1, 0.0}, origin{0.0, 0.0};
    CHECK(rbf_gaussian(x2, origin, 0.1) == doctest::Approx(0.36788).epsilon(1e-5));
}

TEST_CASE("rbf layout and output") {
    const auto layout = RbfLayout::diagonal(2);
    REQUIRE(layout.centers.size() == 5);
    CHECK(layout.centers.front() == std::vector<double>{-0.2, -0.2});
    CHECK(layout.centers[2] == std::vector<double>{0.0, 0.0});
    CHECK(layout.centers.back() == std::vector<double>{0.2, 0.2});
    for (double w : layout.widths) CHECK(w == 0.1);
    CHECK_THROWS_AS(layout.validate(3), std::invalid_argument);

    const std::vector<double> x{0.05, 0.02};
    const auto h = rbf_hidden(x, layout);
    CHECK(h.size() == 5);
    CHECK(rbf_output(std::vector<double>(5, 0.0), h) == 0.0);
    std::vector<double> hot(5, 0.0);
    hot[3] = 1.0;
    CHECK(rbf_output(hot, h) == h[3]);
    CHECK(rbf_output(std::vector<double>{1, -1}, std::vector<double>{0.5, 0.25}) == 0.25);
    CHECK_THROWS_AS(rbf_output(std::vector<double>{1}, h), std::invalid_argument);
}

TEST_CASE("lyapunov_value examples") {
    const std::vector<double> zero{0.0, 0.0}, e1{1.0, 0.0};
    CHECK(lyapunov_value(zero, hand_p(), std::vector<double>(5, 0.0), 100.0) == 0.0);
    CHECK(lyapunov_value(e1, Matrix::identity(2), std::vector<double>(5, 0.0), 100.0) == 0.5);
    CHECK(lyapunov_value(e1, hand_p(), std::vector<double>(5, 1.0), 100.0) == doctest::Approx(0.675));
}

TEST_CASE("lyapunov_value is nonnegative for positive definite P") {
    Gen gen(44);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen.index(1, 4);
        const auto p = gen.spd_matrix(n);
        CHECK(lyapunov_value(gen.vector(n, -1.0, 1.0), p, gen.vector(7, -1.0, 1.0), gen.uniform(1.0, 200.0)) >= 0.0);
    }
}

}  // TEST_SUITE
