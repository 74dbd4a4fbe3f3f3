#pragma once

#include <stdexcept>
#include <vector>

#include "blsd/hvp.hpp"
#include "blsd/tridiag.hpp"
#include "blsd/vec.hpp"

namespace blsd {

/// Orthonormal Krylov basis V = (v_1 .. v_q) of span{g, Hg, H^2 g, ...}
/// together with the projected tridiagonal coefficients, so that
///   H V = V T + beta_next * v_next * e_q^T.
/// effective_q() < the requested q only when the recurrence broke down
/// (an invariant subspace was found); beta_next is then zero.
struct LanczosFactorization {
    std::vector<Vector> basis;  // v_1..v_eff, orthonormal
    std::vector<double> alpha;  // diagonal of T
    std::vector<double> beta;   // off-diagonal of T (between consecutive columns)
    double beta_next = 0.0;     // trailing recurrence coefficient
    Vector next_vector;         // v_{eff+1}; empty on breakdown
    double seed_norm = 0.0;     // |g| of the seed gradient
    int requested_q = 0;

    int effective_q() const { return static_cast<int>(alpha.size()); }
    bool breakdown() const { return beta_next == 0.0; }

    SymTridiag tridiag() const {
        return SymTridiag{alpha, beta};
    }
};

/// Lanczos tridiagonalization of the implicit symmetric operator, seeded
/// with g. Full reorthogonalization (two modified Gram-Schmidt passes
/// against every previous basis vector) keeps the basis orthonormal to
/// roundoff for the small q used here.
///
/// breakdown_tol < 0 selects the scale-aware default 1e-10 * (1 + |alpha_1|).
inline LanczosFactorization lanczos(const HvpOperator& op, const Vector& g, int q,
                                    double breakdown_tol = -1.0) {
    const std::size_t n = op.dim();
    if (g.size() != n) throw std::invalid_argument("lanczos: seed dimension mismatch");
    if (q < 1) throw std::invalid_argument("lanczos: q must be >= 1");
    if (static_cast<std::size_t>(q) > n)
        throw std::invalid_argument("lanczos: q may not exceed the space dimension");
    const double gnorm = vec::norm(g);
    if (gnorm == 0.0) throw std::invalid_argument("lanczos: zero seed");
    if (!std::isfinite(gnorm)) throw std::runtime_error("lanczos: nonfinite seed");

    LanczosFactorization f;
    f.seed_norm = gnorm;
    f.requested_q = q;
    f.basis.push_back(vec::scaled(g, 1.0 / gnorm));

    double tol = breakdown_tol;
    for (int j = 0; j < q; ++j) {
        Vector w = op.apply(f.basis[j]);
        const double aj = vec::dot(f.basis[j], w);
        f.alpha.push_back(aj);
        vec::axpy(-aj, f.basis[j], w);
        if (j > 0) vec::axpy(-f.beta[j - 1], f.basis[j - 1], w);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i) vec::axpy(-vec::dot(f.basis[i], w), f.basis[i], w);

        if (tol < 0.0) tol = 1e-10 * (1.0 + std::abs(f.alpha[0]));
        const double bnext = vec::norm(w);
        if (!std::isfinite(bnext)) throw std::runtime_error("lanczos: nonfinite recurrence");
        if (bnext < tol) break; // invariant subspace; beta_next stays 0
        if (j + 1 < q) {
            f.beta.push_back(bnext);
            f.basis.push_back(vec::scaled(w, 1.0 / bnext));
        } else {
            f.beta_next = bnext;
            f.next_vector = vec::scaled(w, 1.0 / bnext);
        }
    }
    return f;
}

/// V y for a coefficient vector of length effective_q
inline Vector basis_combine(const LanczosFactorization& f, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != f.effective_q())
        throw std::invalid_argument("basis_combine: coefficient length mismatch");
    Vector r = vec::zeros(f.basis.empty() ? 0 : f.basis[0].size());
    for (std::size_t i = 0; i < y.size(); ++i) vec::axpy(y[i], f.basis[i], r);
    return r;
}

/// V^T x
inline std::vector<double> basis_project(const LanczosFactorization& f, const Vector& x) {
    std::vector<double> r(f.effective_q());
    for (int i = 0; i < f.effective_q(); ++i) r[i] = vec::dot(f.basis[i], x);
    return r;
}

inline EigenPair tridiag_min_eigenpair(const LanczosFactorization& f) {
    if (f.effective_q() < 1) throw std::invalid_argument("empty factorization");
    return tridiag_min_eigenpair(f.tridiag());
}

inline TridiagSolveResult tridiag_solve(const LanczosFactorization& f,
                                        const std::vector<double>& rhs, TridiagFilter filter,
                                        double pinv_tol = 1e-12) {
    return tridiag_solve(f.tridiag(), rhs, filter, pinv_tol);
}

} // namespace blsd
