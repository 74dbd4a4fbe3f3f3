#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace blsd {

/// Dense parameter vector. The iterate, gradients and all search
/// directions live in this representation.
using Vector = std::vector<double>;

namespace vec {

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vec::dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vector& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

/// y += c * x
inline void axpy(double c, const Vector& x, Vector& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("vec::axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(Vector& x, double c) {
    for (double& v : x) v *= c;
}

inline Vector scaled(const Vector& x, double c) {
    Vector y = x;
    scale(y, c);
    return y;
}

inline Vector add(const Vector& a, const Vector& b) {
    Vector y = a;
    axpy(1.0, b, y);
    return y;
}

inline Vector sub(const Vector& a, const Vector& b) {
    Vector y = a;
    axpy(-1.0, b, y);
    return y;
}

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline bool all_finite(const Vector& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool is_zero(const Vector& a) {
    for (double x : a)
        if (x != 0.0) return false;
    return true;
}

} // namespace vec
} // namespace blsd
