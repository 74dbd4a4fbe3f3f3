#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "blsd/lanczos.hpp"

namespace blsd {

/// Approximate Newton direction s = V y with T y = -V^T g, the Galerkin
/// condition V^T (H s + g) = 0 restricted to the Krylov subspace.
/// Throws SingularMatrixError when T is numerically singular.
inline Vector newton_direction(const LanczosFactorization& f, const Vector& g,
                               double pinv_tol = 1e-12) {
    auto rhs = basis_project(f, g);
    for (double& r : rhs) r = -r;
    const auto sol = tridiag_solve(f, rhs, TridiagFilter::none, pinv_tol);
    return basis_combine(f, sol.y);
}

/// Positive-curvature variant: columns of V whose diagonal entry of T is
/// negative are discarded and the system is solved on the principal
/// submatrix of T over the kept indices. Equals the Newton direction
/// whenever no diagonal entry is negative; zero when all are.
inline Vector filtered_direction(const LanczosFactorization& f, const Vector& g,
                                 double pinv_tol = 1e-12) {
    auto rhs = basis_project(f, g);
    for (double& r : rhs) r = -r;
    const auto sol = tridiag_solve(f, rhs, TridiagFilter::drop_negative_diagonal, pinv_tol);
    return basis_combine(f, sol.y);
}

struct NegativeCurvatureResult {
    Vector d;                     // unit Ritz vector, or zeros when unused
    double mu = 0.0;              // smallest eigenvalue of T
    double residual_bound = 0.0;  // beta_next * |w_q|, certifies |lambda - mu|
};

/// Ritz direction for the smallest eigenvalue of T. Returns d = 0 when
/// mu >= -tau_nc (no usable negative curvature); otherwise d = V w,
/// negated if needed so that d^T g <= 0. tau_nc < 0 selects the
/// scale-aware default 1e-8 * (1 + |alpha_1|).
inline NegativeCurvatureResult negative_curvature_direction(const LanczosFactorization& f,
                                                            const Vector& g,
                                                            double tau_nc = -1.0) {
    const auto pair = tridiag_min_eigenpair(f);
    NegativeCurvatureResult out;
    out.mu = pair.value;
    out.residual_bound = f.beta_next * std::abs(pair.vector.back());
    if (tau_nc < 0.0) tau_nc = 1e-8 * (1.0 + std::abs(f.alpha[0]));
    if (pair.value >= -tau_nc) {
        out.d = vec::zeros(g.size());
        return out;
    }
    out.d = basis_combine(f, pair.vector);
    if (vec::dot(out.d, g) > 0.0) vec::scale(out.d, -1.0);
    return out;
}

/// The three candidate directions of one iteration.
struct DirectionBundle {
    Vector newton;    // s; zeros when the tridiagonal solve failed
    Vector filtered;  // s~
    Vector neg_curv;  // d; zeros when curvature is non-negative
    double mu = 0.0;
    double ritz_residual_bound = 0.0;
    bool newton_ok = true;
};

inline DirectionBundle compute_directions(const LanczosFactorization& f, const Vector& g,
                                          double tau_nc = -1.0, double pinv_tol = 1e-12) {
    DirectionBundle b;
    try {
        b.newton = newton_direction(f, g, pinv_tol);
    } catch (const SingularMatrixError&) {
        b.newton = vec::zeros(g.size());
        b.newton_ok = false;
    }
    b.filtered = filtered_direction(f, g, pinv_tol);
    auto nc = negative_curvature_direction(f, g, tau_nc);
    b.neg_curv = std::move(nc.d);
    b.mu = nc.mu;
    b.ritz_residual_bound = nc.residual_bound;
    return b;
}

enum class StepRule { s_plus_d, s_plus_scaled_d, stilde_plus_d };

inline const char* to_string(StepRule r) {
    switch (r) {
    case StepRule::s_plus_d: return "s_plus_d";
    case StepRule::s_plus_scaled_d: return "s_plus_scaled_d";
    case StepRule::stilde_plus_d: return "stilde_plus_d";
    }
    return "?";
}

inline StepRule step_rule_from_string(const std::string& s) {
    if (s == "s_plus_d") return StepRule::s_plus_d;
    if (s == "s_plus_scaled_d") return StepRule::s_plus_scaled_d;
    if (s == "stilde_plus_d") return StepRule::stilde_plus_d;
    throw std::invalid_argument("unknown step rule: " + s);
}

struct StepChoice {
    StepRule rule = StepRule::s_plus_d;
    Vector t;
    bool degenerate = false; // vanishing or non-descent; driver must fall back
};

/// Combine the bundle into the trial step. The step is flagged
/// degenerate when it vanishes, when the Newton solve failed, or when it
/// is not a descent direction for the mini-batch gradient:
///   t^T g > -tau_desc * |t| * |g|.
inline StepChoice assemble_step(const DirectionBundle& b, StepRule rule, const Vector& g,
                                double tau_desc = 1e-12) {
    StepChoice c;
    c.rule = rule;
    switch (rule) {
    case StepRule::s_plus_d:
        c.t = vec::add(b.newton, b.neg_curv);
        break;
    case StepRule::s_plus_scaled_d: {
        c.t = b.newton;
        const double dnorm = vec::norm(b.neg_curv);
        if (dnorm > 0.0) vec::axpy(vec::norm(b.newton) / dnorm, b.neg_curv, c.t);
        break;
    }
    case StepRule::stilde_plus_d:
        c.t = vec::add(b.filtered, b.neg_curv);
        break;
    default:
        throw std::invalid_argument("unknown step rule");
    }
    const bool needs_newton = rule != StepRule::stilde_plus_d;
    const double tnorm = vec::norm(c.t);
    c.degenerate = (needs_newton && !b.newton_ok) ||
                   tnorm < 1e-14 * (1.0 + vec::norm(b.newton)) ||
                   vec::dot(c.t, g) > -tau_desc * tnorm * vec::norm(g);
    return c;
}

} // namespace blsd
