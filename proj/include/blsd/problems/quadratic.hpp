#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "blsd/objective.hpp"

namespace blsd {

/// f(x) = 1/2 x^T D x with D = diag(eigenvalues), split into m equal
/// copies f_j = (1/m) f. Mixed-sign spectra give the canonical saddle
/// geometry; the Hessian action is exact and cheap.
class IndefiniteQuadratic : public ComponentObjective {
public:
    IndefiniteQuadratic(int m, std::vector<double> eigenvalues)
        : m_(m), eig_(std::move(eigenvalues)) {
        if (m_ < 1) throw std::invalid_argument("indefinite_quadratic: components must be >= 1");
        if (eig_.empty()) throw std::invalid_argument("indefinite_quadratic: empty eigenvalue list");
    }

    std::size_t dim() const override { return eig_.size(); }
    int components() const override { return m_; }

    double value(int j, const Vector& x) const override {
        check_point(j, x);
        double s = 0.0;
        for (std::size_t i = 0; i < eig_.size(); ++i) s += eig_[i] * x[i] * x[i];
        return 0.5 * s / m_;
    }

    Vector gradient(int j, const Vector& x) const override {
        check_point(j, x);
        Vector g(x.size());
        for (std::size_t i = 0; i < eig_.size(); ++i) g[i] = eig_[i] * x[i] / m_;
        return g;
    }

    bool has_exact_hvp() const override { return true; }

    Vector exact_hvp(int j, const Vector& x, const Vector& v) const override {
        check_point(j, x);
        if (v.size() != dim()) throw std::invalid_argument("indefinite_quadratic: hvp dimension mismatch");
        Vector h(v.size());
        for (std::size_t i = 0; i < eig_.size(); ++i) h[i] = eig_[i] * v[i] / m_;
        return h;
    }

    const std::vector<double>& eigenvalues() const { return eig_; }

private:
    int m_;
    std::vector<double> eig_;
};

inline std::unique_ptr<ComponentObjective>
make_indefinite_quadratic(int dim, int m, std::vector<double> eigenvalues) {
    if (static_cast<std::size_t>(dim) != eigenvalues.size())
        throw std::invalid_argument("indefinite_quadratic: eigenvalue list length must equal dim");
    return std::make_unique<IndefiniteQuadratic>(m, std::move(eigenvalues));
}

} // namespace blsd
