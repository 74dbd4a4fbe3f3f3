#include <catch2/catch_amalgamated.hpp>

#include "blsd/directions.hpp"
#include "support/test_support.hpp"

using namespace blsd;
using Catch::Approx;
using testsupport::DenseSymObjective;

namespace {

DenseSymObjective diag_objective(const std::vector<double>& eig) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(eig.size(), eig.size());
    for (std::size_t i = 0; i < eig.size(); ++i) a(i, i) = eig[i];
    return DenseSymObjective(a);
}

LanczosFactorization factorize(const DenseSymObjective& obj, const Vector& g, int q) {
    return lanczos(*exact_hvp(obj, 1, g), g, q);
}

} // namespace

TEST_CASE("newton direction solves the convex diagonal system") {
    const auto obj = diag_objective({2.0, 4.0});
    const Vector g = {2.0, 4.0};
    const auto f = factorize(obj, g, 2);
    const Vector s = newton_direction(f, g);
    CHECK(s[0] == Approx(-1.0));
    CHECK(s[1] == Approx(-1.0));
}

TEST_CASE("newton direction equals steepest descent for the identity") {
    const auto obj = diag_objective({1.0, 1.0, 1.0});
    const Vector g = {0.3, -0.2, 0.9};
    const auto f = factorize(obj, g, 3);
    const Vector s = newton_direction(f, g);
    for (int i = 0; i < 3; ++i) CHECK(s[i] == Approx(-g[i]));
}

TEST_CASE("newton direction handles the indefinite 2x2 saddle") {
    const auto obj = diag_objective({1.0, -1.0});
    const double c = 1.0 / std::sqrt(2.0);
    const Vector g = {c, c};
    const auto f = factorize(obj, g, 2);
    const Vector s = newton_direction(f, g);
    CHECK(s[0] == Approx(-c));
    CHECK(s[1] == Approx(c));
}

TEST_CASE("filtered direction equals newton when curvature is positive") {
    Rng rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + rng.uniform_int(0, 10);
        const DenseSymObjective obj(testsupport::random_spd(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = factorize(obj, g, std::min(5, n));
        for (double a : f.alpha) REQUIRE(a > 0.0); // positive definite projection
        const Vector s = newton_direction(f, g);
        const Vector st = filtered_direction(f, g);
        CHECK(s == st); // identical arithmetic path, identical bits
    }
}

TEST_CASE("filtered direction is zero when every diagonal entry is negative") {
    const auto obj = diag_objective({-1.0, -2.0, -3.0});
    Rng rng(16);
    const Vector g = rng.normal_vector(3);
    const auto f = factorize(obj, g, 3);
    for (double a : f.alpha) REQUIRE(a < 0.0);
    const Vector st = filtered_direction(f, g);
    CHECK(vec::is_zero(st));
}

TEST_CASE("negative curvature direction on the saddle points away from growth") {
    const auto obj = diag_objective({1.0, -1.0});
    const double c = 1.0 / std::sqrt(2.0);
    const Vector g = {c, c};
    const auto f = factorize(obj, g, 2);
    const auto nc = negative_curvature_direction(f, g);
    CHECK(nc.mu == Approx(-1.0));
    CHECK(nc.d[0] == Approx(0.0).margin(1e-10));
    CHECK(nc.d[1] == Approx(-1.0));
    CHECK(vec::dot(nc.d, g) <= 0.0);
}

TEST_CASE("negative curvature direction is zero on positive definite problems") {
    Rng rng(17);
    const DenseSymObjective obj(testsupport::random_spd(8, rng));
    const Vector g = rng.normal_vector(8);
    const auto f = factorize(obj, g, 5);
    const auto nc = negative_curvature_direction(f, g, 1e-8);
    CHECK(vec::is_zero(nc.d));
    CHECK(nc.mu > 0.0);
}

TEST_CASE("breakdown hides curvature invisible to the Krylov space") {
    const auto obj = diag_objective({1.0, -1.0});
    const Vector g = {1.0, 0.0};
    const auto f = factorize(obj, g, 2);
    REQUIRE(f.effective_q() == 1);
    const auto nc = negative_curvature_direction(f, g);
    CHECK(nc.mu == Approx(1.0));
    CHECK(vec::is_zero(nc.d));
}

TEST_CASE("assemble_step combines directions per rule") {
    DirectionBundle b;
    b.newton = {1.0, 0.0};
    b.filtered = {1.0, 0.0};
    b.neg_curv = {0.0, 2.0};
    b.mu = -1.0;
    const Vector g = {-1.0, -1.0};

    const auto plain = assemble_step(b, StepRule::s_plus_d, g);
    CHECK(plain.t == Vector{1.0, 2.0});
    CHECK_FALSE(plain.degenerate);

    const auto scaled = assemble_step(b, StepRule::s_plus_scaled_d, g);
    CHECK(scaled.t == Vector{1.0, 1.0});

    const auto tilde = assemble_step(b, StepRule::stilde_plus_d, g);
    CHECK(tilde.t == Vector{1.0, 2.0});
}

TEST_CASE("assemble_step flags the cancelled saddle step") {
    DirectionBundle b;
    b.newton = {0.0, -1.0};
    b.filtered = {0.0, 0.0};
    b.neg_curv = {0.0, 1.0};
    b.mu = -1.0;
    const Vector g = {0.0, -1.0};
    const auto step = assemble_step(b, StepRule::s_plus_d, g);
    CHECK(step.degenerate);
    CHECK(vec::norm(step.t) <= 1e-13);
}

TEST_CASE("assemble_step flags non-descent directions") {
    DirectionBundle b;
    b.newton = {0.0, -2.0}; // toward the saddle: uphill for this gradient
    b.filtered = b.newton;
    b.neg_curv = {0.0, 1.0};
    const Vector g = {0.0, -2.0};
    const auto step = assemble_step(b, StepRule::s_plus_d, g); // t = (0,-1), t^T g = 2 > 0
    CHECK(step.degenerate);
}

TEST_CASE("newton direction with the full subspace matches the dense inverse") {
    Rng rng(19);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 2 + rng.uniform_int(0, 8);
        const DenseSymObjective obj(testsupport::random_symmetric(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = factorize(obj, g, n);
        if (f.effective_q() < n) continue; // unlucky invariant subspace
        const Vector s = newton_direction(f, g);
        const Eigen::VectorXd want =
            -obj.matrix().colPivHouseholderQr().solve(testsupport::to_eigen(g));
        CHECK(testsupport::rel_err(s, testsupport::from_eigen(want)) <= 1e-8);
    }
}

TEST_CASE("galerkin residual of the newton direction is small") {
    Rng rng(20);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 10 + rng.uniform_int(0, 30);
        const DenseSymObjective obj(testsupport::random_symmetric(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = factorize(obj, g, 5);
        const Vector s = newton_direction(f, g);
        Vector hs_plus_g = exact_hvp(obj, 1, g)->apply(s);
        vec::axpy(1.0, g, hs_plus_g);
        const auto proj = basis_project(f, hs_plus_g);
        double res = 0.0;
        for (double p : proj) res += p * p;
        CHECK(std::sqrt(res) <= 1e-6 * vec::norm(g));
    }
}

TEST_CASE("curvature certificate holds whenever d is returned") {
    Rng rng(21);
    int seen = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 10 + rng.uniform_int(0, 30);
        const DenseSymObjective obj(testsupport::random_symmetric(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = factorize(obj, g, 5);
        const auto nc = negative_curvature_direction(f, g);
        if (vec::is_zero(nc.d)) continue;
        ++seen;
        CHECK(vec::dot(nc.d, g) <= 0.0);
        CHECK(vec::norm(nc.d) == Approx(1.0).epsilon(1e-10));
        const Vector hd = exact_hvp(obj, 1, g)->apply(nc.d);
        const double dhd = vec::dot(nc.d, hd);
        CHECK(std::abs(dhd - nc.mu) <= nc.residual_bound + 1e-8);
        CHECK(dhd < 0.0);
    }
    CHECK(seen > 10); // random symmetric matrices are indefinite almost surely
}
