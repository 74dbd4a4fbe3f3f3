#pragma once

#include <stdexcept>

#include "blsd/objective.hpp"

namespace blsd {

/// Sum of independent Rosenbrock pairs:
///   f = sum_p 100 (x_{2p+1} - x_{2p}^2)^2 + (1 - x_{2p})^2
/// Pairs are partitioned into m contiguous blocks, so components touch
/// disjoint coordinates. Global minimum at the all-ones point.
class RosenbrockSum : public ComponentObjective {
public:
    RosenbrockSum(int dim, int m) : n_(dim), m_(m) {
        if (n_ < 2 || n_ % 2 != 0)
            throw std::invalid_argument("rosenbrock_sum: dim must be even and >= 2");
        if (m_ < 1) throw std::invalid_argument("rosenbrock_sum: components must be >= 1");
        const int pairs = n_ / 2;
        if (m_ > pairs)
            throw std::invalid_argument("rosenbrock_sum: more components than coordinate pairs");
    }

    std::size_t dim() const override { return static_cast<std::size_t>(n_); }
    int components() const override { return m_; }

    double value(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = pair_range(j);
        double s = 0.0;
        for (int p = lo; p < hi; ++p) {
            const double a = x[2 * p], b = x[2 * p + 1];
            const double r = b - a * a;
            s += 100.0 * r * r + (1.0 - a) * (1.0 - a);
        }
        return s;
    }

    Vector gradient(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = pair_range(j);
        Vector g = vec::zeros(x.size());
        for (int p = lo; p < hi; ++p) {
            const double a = x[2 * p], b = x[2 * p + 1];
            const double r = b - a * a;
            g[2 * p] = -400.0 * a * r - 2.0 * (1.0 - a);
            g[2 * p + 1] = 200.0 * r;
        }
        return g;
    }

    bool has_exact_hvp() const override { return true; }

    Vector exact_hvp(int j, const Vector& x, const Vector& v) const override {
        check_point(j, x);
        if (v.size() != dim()) throw std::invalid_argument("rosenbrock_sum: hvp dimension mismatch");
        auto [lo, hi] = pair_range(j);
        Vector h = vec::zeros(v.size());
        for (int p = lo; p < hi; ++p) {
            const double a = x[2 * p], b = x[2 * p + 1];
            const double haa = 1200.0 * a * a - 400.0 * b + 2.0;
            const double hab = -400.0 * a;
            h[2 * p] = haa * v[2 * p] + hab * v[2 * p + 1];
            h[2 * p + 1] = hab * v[2 * p] + 200.0 * v[2 * p + 1];
        }
        return h;
    }

private:
    // component j owns pairs [lo, hi); last block takes the remainder
    std::pair<int, int> pair_range(int j) const {
        const int pairs = n_ / 2;
        const int base = pairs / m_;
        const int lo = (j - 1) * base;
        const int hi = (j == m_) ? pairs : j * base;
        return {lo, hi};
    }

    int n_;
    int m_;
};

inline std::unique_ptr<ComponentObjective> make_rosenbrock_sum(int dim, int m) {
    return std::make_unique<RosenbrockSum>(dim, m);
}

} // namespace blsd
