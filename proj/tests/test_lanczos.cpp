#include <catch2/catch_amalgamated.hpp>

#include "blsd/lanczos.hpp"
#include "support/test_support.hpp"

using namespace blsd;
using Catch::Approx;
using testsupport::DenseSymObjective;

namespace {

HvpOperator operator_for(const DenseSymObjective& obj, const Vector& x) {
    return *exact_hvp(obj, 1, x);
}

DenseSymObjective diag_objective(const std::vector<double>& eig) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(eig.size(), eig.size());
    for (std::size_t i = 0; i < eig.size(); ++i) a(i, i) = eig[i];
    return DenseSymObjective(a);
}

} // namespace

TEST_CASE("identity operator breaks down after one step") {
    const auto obj = diag_objective(std::vector<double>(7, 1.0));
    Rng rng(2);
    const Vector g = rng.normal_vector(7);
    const auto f = lanczos(operator_for(obj, g), g, 5);
    CHECK(f.effective_q() == 1);
    CHECK(f.alpha[0] == Approx(1.0));
    CHECK(f.beta_next == 0.0);
    CHECK(f.breakdown());
}

TEST_CASE("full factorization of diag(1..10) recovers the spectrum") {
    std::vector<double> eig(10);
    for (int i = 0; i < 10; ++i) eig[i] = i + 1.0;
    const auto obj = diag_objective(eig);
    const Vector g(10, 1.0 / std::sqrt(10.0));
    const auto f = lanczos(operator_for(obj, g), g, 10);
    REQUIRE(f.effective_q() == 10);

    // eigenvalues of T against the known spectrum
    std::vector<std::vector<double>> dense(10, std::vector<double>(10, 0.0));
    for (int i = 0; i < 10; ++i) {
        dense[i][i] = f.alpha[i];
        if (i + 1 < 10) dense[i][i + 1] = dense[i + 1][i] = f.beta[i];
    }
    const auto dec = jacobi_eigensolve(dense);
    for (int i = 0; i < 10; ++i) CHECK(dec.values[i] == Approx(eig[i]).margin(1e-8));
}

TEST_CASE("seed aligned with an eigenvector hides the rest of the spectrum") {
    const auto obj = diag_objective({1.0, -1.0});
    const Vector g = {1.0, 0.0};
    const auto f = lanczos(operator_for(obj, g), g, 2);
    CHECK(f.effective_q() == 1);
    CHECK(f.alpha[0] == Approx(1.0));
    CHECK(f.beta_next == 0.0);
}

TEST_CASE("lanczos rejects invalid seeds and subspace sizes") {
    const auto obj = diag_objective({1.0, 2.0});
    const auto op = operator_for(obj, {1.0, 1.0});
    CHECK_THROWS_AS(lanczos(op, {0.0, 0.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(lanczos(op, {1.0, 1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(lanczos(op, {1.0, 1.0}, 3), std::invalid_argument);
}

TEST_CASE("basis stays orthonormal and the recurrence holds") {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 10 + rng.uniform_int(0, 90);
        const int q = 2 + rng.uniform_int(0, 10);
        const DenseSymObjective obj(testsupport::random_symmetric(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = lanczos(operator_for(obj, g), g, q);
        const int eff = f.effective_q();

        double max_ortho = 0.0;
        for (int i = 0; i < eff; ++i)
            for (int j = 0; j < eff; ++j) {
                const double want = i == j ? 1.0 : 0.0;
                max_ortho = std::max(max_ortho,
                                     std::abs(vec::dot(f.basis[i], f.basis[j]) - want));
            }
        CHECK(max_ortho <= 1e-8);

        const double hnorm = obj.matrix().cwiseAbs().rowwise().sum().maxCoeff();
        const auto op = operator_for(obj, g);
        for (int j = 0; j < eff; ++j) {
            Vector r = op.apply(f.basis[j]);
            vec::axpy(-f.alpha[j], f.basis[j], r);
            if (j > 0) vec::axpy(-f.beta[j - 1], f.basis[j - 1], r);
            if (j + 1 < eff)
                vec::axpy(-f.beta[j], f.basis[j + 1], r);
            else if (!f.breakdown())
                vec::axpy(-f.beta_next, f.next_vector, r);
            CHECK(vec::norm(r) <= 1e-8 * hnorm);
        }
    }
}

TEST_CASE("ritz value of T approximates an eigenvalue of H within beta_next") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 20 + rng.uniform_int(0, 20);
        const DenseSymObjective obj(testsupport::random_symmetric(n, rng));
        const Vector g = rng.normal_vector(n);
        const auto f = lanczos(operator_for(obj, g), g, 5);
        const auto pair = tridiag_min_eigenpair(f);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(obj.matrix());
        double closest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            closest = std::min(closest, std::abs(es.eigenvalues()(i) - pair.value));
        CHECK(closest <= f.beta_next + 1e-10);

        // residual identity for the mapped-back Ritz vector
        const Vector d = basis_combine(f, pair.vector);
        Vector hd = operator_for(obj, g).apply(d);
        vec::axpy(-pair.value, d, hd);
        CHECK(vec::norm(hd) ==
              Approx(f.beta_next * std::abs(pair.vector.back())).margin(1e-8));
    }
}

TEST_CASE("breakdown still satisfies the recurrence with beta_next zero") {
    // rank-2 operator in a 6-dimensional space: the Krylov space is tiny
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 0) = 3.0;
    a(1, 1) = -2.0;
    const DenseSymObjective obj(a);
    const Vector g = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    const auto f = lanczos(operator_for(obj, g), g, 6);
    CHECK(f.effective_q() < 6);
    CHECK(f.beta_next == 0.0);
    const auto op = operator_for(obj, g);
    for (int j = 0; j < f.effective_q(); ++j) {
        Vector r = op.apply(f.basis[j]);
        vec::axpy(-f.alpha[j], f.basis[j], r);
        if (j > 0) vec::axpy(-f.beta[j - 1], f.basis[j - 1], r);
        if (j + 1 < f.effective_q()) vec::axpy(-f.beta[j], f.basis[j + 1], r);
        CHECK(vec::norm(r) <= 1e-8 * 3.0);
    }
}

TEST_CASE("seed norm is recorded") {
    const auto obj = diag_objective({2.0, 3.0});
    const Vector g = {3.0, 4.0};
    const auto f = lanczos(operator_for(obj, g), g, 2);
    CHECK(f.seed_norm == Approx(5.0));
    CHECK(vec::norm(f.basis[0]) == Approx(1.0));
}
