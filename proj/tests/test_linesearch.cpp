#include <catch2/catch_amalgamated.hpp>

#include "blsd/linesearch.hpp"
#include "blsd/problems.hpp"

using namespace blsd;
using Catch::Approx;

namespace {

// f(x) = x^2 / 2 in one variable
std::unique_ptr<ComponentObjective> half_square() {
    return make_indefinite_quadratic(1, 1, {1.0});
}

} // namespace

TEST_CASE("full step is accepted when it satisfies sufficient decrease") {
    auto obj = half_square();
    ArmijoParams p;
    const auto r = armijo_linesearch(*obj, 1, {1.0}, {-1.0}, obj->gradient(1, {1.0}), p);
    REQUIRE(r.has_value());
    CHECK(r->alpha == 1.0);
    CHECK(r->f_after == Approx(0.0).margin(1e-15));
    CHECK(r->trials == 1);
}

TEST_CASE("ascent directions are rejected outright") {
    auto obj = half_square();
    CHECK_THROWS_AS(armijo_linesearch(*obj, 1, {1.0}, {1.0}, obj->gradient(1, {1.0}), {}),
                    std::invalid_argument);
}

TEST_CASE("backtracking walks down the geometric ladder") {
    // aggressive direction t = -4 with eta = 1/2: alpha = 1 overshoots
    // (f = 4.5), alpha = 1/2 lands at f = 0.5 against a bound of -0.5,
    // alpha = 1/4 hits f = 0 against a bound of exactly 0, which the
    // strict inequality refuses; alpha = 1/8 is the first acceptance.
    auto obj = half_square();
    ArmijoParams p;
    p.eta = 0.5;
    const auto r = armijo_linesearch(*obj, 1, {1.0}, {-4.0}, obj->gradient(1, {1.0}), p);
    REQUIRE(r.has_value());
    CHECK(r->alpha == Approx(0.125));
    CHECK(r->trials == 4);
    CHECK(r->slope == Approx(-4.0));
}

TEST_CASE("an exhausted trial budget reports failure") {
    auto obj = half_square();
    ArmijoParams p;
    p.eta = 0.99; // needs alpha < 0.02 on this function
    p.max_backtracks = 3;
    const auto r = armijo_linesearch(*obj, 1, {1.0}, {-1.0}, obj->gradient(1, {1.0}), p);
    CHECK_FALSE(r.has_value());
}

TEST_CASE("accepted steps satisfy the strict inequality") {
    auto obj = make_rosenbrock_sum(4, 1);
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector x = rng.normal_vector(4);
        const Vector g = obj->gradient(1, x);
        if (vec::norm(g) < 1e-10) continue;
        const Vector t = vec::scaled(g, -1.0);
        const auto r = armijo_linesearch(*obj, 1, x, t, g, {});
        if (!r) continue;
        CHECK(r->f_after < r->f_before + 1e-4 * r->alpha * r->slope);
    }
}

TEST_CASE("parameter validation") {
    auto obj = half_square();
    ArmijoParams p;
    p.eta = 1.5;
    CHECK_THROWS_AS(armijo_linesearch(*obj, 1, {1.0}, {-1.0}, {1.0}, p), std::invalid_argument);
}
