#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

#include "blsd/vec.hpp"

namespace blsd {

/// Finite-sum objective f(x) = sum_{j=1..m} f_j(x) exposed through
/// per-component oracles. Component indices are 1-based. Implementations
/// are immutable after construction and safe to call concurrently.
class ComponentObjective {
public:
    virtual ~ComponentObjective() = default;

    virtual std::size_t dim() const = 0;
    virtual int components() const = 0;

    virtual double value(int j, const Vector& x) const = 0;
    virtual Vector gradient(int j, const Vector& x) const = 0;

    /// Analytic Hessian-vector product of f_j at x, where supported.
    virtual bool has_exact_hvp() const { return false; }
    virtual Vector exact_hvp(int /*j*/, const Vector& /*x*/, const Vector& /*v*/) const {
        throw std::logic_error("exact Hessian-vector product unsupported for this objective");
    }

protected:
    void check_point(int j, const Vector& x) const {
        if (j < 1 || j > components())
            throw std::invalid_argument("component index out of range: " + std::to_string(j));
        if (x.size() != dim())
            throw std::invalid_argument("dimension mismatch: point has " +
                                        std::to_string(x.size()) + " entries, objective expects " +
                                        std::to_string(dim()));
    }
};

inline double full_value(const ComponentObjective& obj, const Vector& x) {
    double s = 0.0;
    for (int j = 1; j <= obj.components(); ++j) s += obj.value(j, x);
    return s;
}

inline Vector full_gradient(const ComponentObjective& obj, const Vector& x) {
    Vector g = vec::zeros(obj.dim());
    for (int j = 1; j <= obj.components(); ++j) vec::axpy(1.0, obj.gradient(j, x), g);
    return g;
}

/// Forwarding wrapper that counts oracle calls.
class CountingObjective : public ComponentObjective {
public:
    explicit CountingObjective(const ComponentObjective& inner) : inner_(inner) {}

    std::size_t dim() const override { return inner_.dim(); }
    int components() const override { return inner_.components(); }

    double value(int j, const Vector& x) const override {
        ++value_calls_;
        return inner_.value(j, x);
    }
    Vector gradient(int j, const Vector& x) const override {
        ++gradient_calls_;
        return inner_.gradient(j, x);
    }
    bool has_exact_hvp() const override { return inner_.has_exact_hvp(); }
    Vector exact_hvp(int j, const Vector& x, const Vector& v) const override {
        ++hvp_calls_;
        return inner_.exact_hvp(j, x, v);
    }

    long value_calls() const { return value_calls_.load(); }
    long gradient_calls() const { return gradient_calls_.load(); }
    long hvp_calls() const { return hvp_calls_.load(); }

private:
    const ComponentObjective& inner_;
    mutable std::atomic<long> value_calls_{0};
    mutable std::atomic<long> gradient_calls_{0};
    mutable std::atomic<long> hvp_calls_{0};
};

} // namespace blsd
