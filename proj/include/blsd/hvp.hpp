#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "blsd/objective.hpp"

namespace blsd {

enum class HvpMode { exact, finite_difference };

/// Hessian batch: action of one component's Hessian or of the full sum.
enum class HvpScope { minibatch, fullbatch };

inline double default_fd_epsilon() {
    return std::sqrt(std::numeric_limits<double>::epsilon());
}

/// The action v -> H v of an implicit Hessian fixed to one (component,
/// point) pair at construction. Immutable; concurrent apply calls are
/// safe.
class HvpOperator {
public:
    using ApplyFn = std::function<Vector(const Vector&)>;

    HvpOperator(std::size_t dim, HvpMode mode, ApplyFn fn)
        : dim_(dim), mode_(mode), fn_(std::move(fn)) {}

    std::size_t dim() const { return dim_; }
    HvpMode mode() const { return mode_; }

    Vector apply(const Vector& v) const {
        if (v.size() != dim_) throw std::invalid_argument("hvp: direction dimension mismatch");
        Vector h = fn_(v);
        if (!vec::all_finite(h)) throw std::runtime_error("hvp: nonfinite Hessian-vector product");
        return h;
    }

private:
    std::size_t dim_;
    HvpMode mode_;
    ApplyFn fn_;
};

/// Analytic Hessian action of f_j at x; empty when the objective does
/// not support it (callers fall back to differencing).
inline std::optional<HvpOperator> exact_hvp(const ComponentObjective& obj, int j,
                                            const Vector& x) {
    if (!obj.has_exact_hvp()) return std::nullopt;
    return HvpOperator(obj.dim(), HvpMode::exact,
                       [&obj, j, x](const Vector& v) { return obj.exact_hvp(j, x, v); });
}

/// One-sided differenced Hessian action
///   H v ~ (grad f_j(x + eps v) - grad f_j(x)) / eps,
/// eps = eps0 * (1 + |x|) / |v|. The base gradient is evaluated once at
/// construction, so each apply costs a single extra gradient call.
inline HvpOperator fd_hvp(const ComponentObjective& obj, int j, const Vector& x,
                          double eps0 = default_fd_epsilon()) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("fd_hvp: epsilon scale must be positive");
    Vector g0 = obj.gradient(j, x);
    if (!vec::all_finite(g0)) throw std::runtime_error("fd_hvp: nonfinite gradient at base point");
    const double xnorm = vec::norm(x);
    return HvpOperator(obj.dim(), HvpMode::finite_difference,
                       [&obj, j, x, eps0, xnorm, g0 = std::move(g0)](const Vector& v) {
                           const double vnorm = vec::norm(v);
                           if (vnorm == 0.0) throw std::invalid_argument("fd_hvp: zero direction");
                           const double eps = eps0 * (1.0 + xnorm) / vnorm;
                           Vector xs = x;
                           vec::axpy(eps, v, xs);
                           Vector h = obj.gradient(j, xs);
                           vec::axpy(-1.0, g0, h);
                           vec::scale(h, 1.0 / eps);
                           return h;
                       });
}

enum class HvpModeChoice { automatic, exact, finite_difference };

/// Operator factory used by the drivers: exact where available (or as
/// forced by mode), differenced otherwise. Full-batch scope sums the
/// component Hessians while the gradient seed stays mini-batch.
inline HvpOperator make_hvp(const ComponentObjective& obj, int j, const Vector& x,
                            HvpModeChoice mode = HvpModeChoice::automatic,
                            HvpScope scope = HvpScope::minibatch,
                            double eps0 = default_fd_epsilon()) {
    const bool want_exact = mode == HvpModeChoice::exact ||
                            (mode == HvpModeChoice::automatic && obj.has_exact_hvp());
    if (want_exact && !obj.has_exact_hvp())
        throw std::invalid_argument("hvp mode 'exact' requested but objective has no analytic product");

    if (scope == HvpScope::fullbatch) {
        if (want_exact)
            return HvpOperator(obj.dim(), HvpMode::exact, [&obj, x](const Vector& v) {
                Vector h = vec::zeros(obj.dim());
                for (int c = 1; c <= obj.components(); ++c)
                    vec::axpy(1.0, obj.exact_hvp(c, x, v), h);
                return h;
            });
        // differenced full gradient
        Vector g0 = full_gradient(obj, x);
        const double xnorm = vec::norm(x);
        return HvpOperator(obj.dim(), HvpMode::finite_difference,
                           [&obj, x, eps0, xnorm, g0 = std::move(g0)](const Vector& v) {
                               const double vnorm = vec::norm(v);
                               if (vnorm == 0.0)
                                   throw std::invalid_argument("fd_hvp: zero direction");
                               const double eps = eps0 * (1.0 + xnorm) / vnorm;
                               Vector xs = x;
                               vec::axpy(eps, v, xs);
                               Vector h = full_gradient(obj, xs);
                               vec::axpy(-1.0, g0, h);
                               vec::scale(h, 1.0 / eps);
                               return h;
                           });
    }
    if (want_exact) return *exact_hvp(obj, j, x);
    return fd_hvp(obj, j, x, eps0);
}

} // namespace blsd
