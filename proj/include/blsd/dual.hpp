#pragma once

#include <cmath>

namespace blsd {

/// First-order dual scalar: carries a value and one directional
/// derivative. Running a scalar-templated analytic gradient routine on
/// Dual inputs seeded with (x, v) yields the exact Hessian-vector
/// product H(x)v in the derivative channel.
struct Dual {
    double v = 0.0; // value
    double d = 0.0; // directional derivative

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) {
        d = d * o.v + v * o.d;
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        d = (d * o.v - v * o.d) / (o.v * o.v);
        v /= o.v;
        return *this;
    }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator+(const Dual& a) { return a; }

// comparisons act on the value channel; used for branch selection
// (softmax stabilization), which is derivative-safe away from ties
inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

inline Dual exp(const Dual& a) {
    const double e = std::exp(a.v);
    return {e, e * a.d};
}

inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }

inline Dual sqrt(const Dual& a) {
    const double r = std::sqrt(a.v);
    return {r, a.d / (2.0 * r)};
}

inline Dual tanh(const Dual& a) {
    const double t = std::tanh(a.v);
    return {t, (1.0 - t * t) * a.d};
}

/// value-channel extraction for code generic over double/Dual
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

} // namespace blsd
