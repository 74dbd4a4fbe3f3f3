#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "blsd/objective.hpp"

namespace blsd {

struct ArmijoParams {
    double eta = 1e-4;       // sufficient-decrease constant, in (0,1)
    double rho = 0.5;        // backtrack factor, in (0,1)
    double alpha0 = 1.0;     // first trial step
    int max_backtracks = 30; // trial budget
};

struct ArmijoResult {
    double alpha = 0.0;
    double f_before = 0.0;
    double f_after = 0.0;
    double slope = 0.0; // t^T grad f_j(x)
    int trials = 0;
};

/// Backtracking line search on the mini-batch component: accepts the
/// first alpha in {alpha0, rho*alpha0, ...} with
///   f_j(x + alpha t) < f_j(x) + eta * alpha * t^T g_j   (strict).
/// Throws if t is not a descent direction; returns nullopt when the
/// trial budget is exhausted. Nonfinite trial values count as failed
/// trials so overshooting into an invalid region just backtracks.
inline std::optional<ArmijoResult> armijo_linesearch(const ComponentObjective& obj, int j,
                                                     const Vector& x, const Vector& t,
                                                     const Vector& g_j,
                                                     const ArmijoParams& p = {}) {
    if (!(p.eta > 0.0 && p.eta < 1.0) || !(p.rho > 0.0 && p.rho < 1.0) || !(p.alpha0 > 0.0) ||
        p.max_backtracks < 1)
        throw std::invalid_argument("armijo_linesearch: bad parameters");
    const double slope = vec::dot(t, g_j);
    if (slope >= 0.0) throw std::invalid_argument("armijo_linesearch: not a descent direction");
    const double f0 = obj.value(j, x);

    double alpha = p.alpha0;
    for (int i = 0; i < p.max_backtracks; ++i, alpha *= p.rho) {
        Vector xt = x;
        vec::axpy(alpha, t, xt);
        const double ft = obj.value(j, xt);
        if (std::isfinite(ft) && ft < f0 + p.eta * alpha * slope)
            return ArmijoResult{alpha, f0, ft, slope, i + 1};
    }
    return std::nullopt;
}

} // namespace blsd
