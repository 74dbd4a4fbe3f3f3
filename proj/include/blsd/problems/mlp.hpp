#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "blsd/objective.hpp"
#include "blsd/rng.hpp"

namespace blsd {

/// Least-squares loss of a small dense tanh network on a fixed dataset.
/// No analytic Hessian action is provided; this problem exists to
/// exercise the differenced Hessian-vector path.
class MlpLeastSquares : public ComponentObjective {
public:
    /// inputs[i] has widths.front() entries, targets[i] widths.back()
    MlpLeastSquares(std::vector<int> widths, std::vector<Vector> inputs,
                    std::vector<Vector> targets, int m)
        : widths_(std::move(widths)), inputs_(std::move(inputs)),
          targets_(std::move(targets)), m_(m) {
        if (widths_.size() < 3)
            throw std::invalid_argument("mlp_least_squares: needs at least one hidden layer");
        for (int w : widths_)
            if (w < 1) throw std::invalid_argument("mlp_least_squares: degenerate layer width");
        if (m_ < 1) throw std::invalid_argument("mlp_least_squares: components must be >= 1");
        if (inputs_.size() != targets_.size() || inputs_.empty())
            throw std::invalid_argument("mlp_least_squares: bad dataset");
        if (static_cast<int>(inputs_.size()) < m_)
            throw std::invalid_argument("mlp_least_squares: sample count below component count");
        for (const auto& z : inputs_)
            if (z.size() != static_cast<std::size_t>(widths_.front()))
                throw std::invalid_argument("mlp_least_squares: input dimension mismatch");
        for (const auto& y : targets_)
            if (y.size() != static_cast<std::size_t>(widths_.back()))
                throw std::invalid_argument("mlp_least_squares: target dimension mismatch");

        std::size_t off = 0;
        for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
            w_off_.push_back(off);
            off += static_cast<std::size_t>(widths_[l + 1]) * widths_[l];
            b_off_.push_back(off);
            off += static_cast<std::size_t>(widths_[l + 1]);
        }
        n_ = off;
    }

    std::size_t dim() const override { return n_; }
    int components() const override { return m_; }
    int samples() const { return static_cast<int>(inputs_.size()); }
    const std::vector<int>& widths() const { return widths_; }

    /// network output for weights x at input z
    Vector predict(const Vector& x, const Vector& z) const {
        std::vector<std::vector<double>> acts;
        forward(x, z, acts);
        return Vector(acts.back().begin(), acts.back().end());
    }

    double value(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = block_range(j);
        double s = 0.0;
        std::vector<std::vector<double>> acts;
        for (int i = lo; i < hi; ++i) {
            forward(x, inputs_[i], acts);
            const auto& out = acts.back();
            for (std::size_t d = 0; d < out.size(); ++d) {
                const double r = out[d] - targets_[i][d];
                s += 0.5 * r * r;
            }
        }
        return s / inputs_.size();
    }

    Vector gradient(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = block_range(j);
        Vector g = vec::zeros(n_);
        std::vector<std::vector<double>> acts;
        for (int i = lo; i < hi; ++i) {
            forward(x, inputs_[i], acts);
            backprop(x, i, acts, g);
        }
        vec::scale(g, 1.0 / inputs_.size());
        return g;
    }

private:
    std::pair<int, int> block_range(int j) const {
        const int S = static_cast<int>(inputs_.size());
        const int base = S / m_;
        const int lo = (j - 1) * base;
        const int hi = (j == m_) ? S : j * base;
        return {lo, hi};
    }

    // acts[0] = input, acts[l] = activation after layer l (tanh on all
    // but the last transition, which stays linear)
    void forward(const Vector& x, const Vector& z, std::vector<std::vector<double>>& acts) const {
        const std::size_t layers = widths_.size() - 1;
        acts.assign(widths_.size(), {});
        acts[0].assign(z.begin(), z.end());
        for (std::size_t l = 0; l < layers; ++l) {
            const int a = widths_[l], b = widths_[l + 1];
            acts[l + 1].assign(b, 0.0);
            for (int r = 0; r < b; ++r) {
                double s = x[b_off_[l] + r];
                for (int c = 0; c < a; ++c) s += x[w_off_[l] + r * a + c] * acts[l][c];
                acts[l + 1][r] = (l + 1 < layers) ? std::tanh(s) : s;
            }
        }
    }

    void backprop(const Vector& x, int i, const std::vector<std::vector<double>>& acts,
                  Vector& g) const {
        const std::size_t layers = widths_.size() - 1;
        std::vector<double> delta(acts.back().size());
        for (std::size_t d = 0; d < delta.size(); ++d) delta[d] = acts.back()[d] - targets_[i][d];
        for (std::size_t l = layers; l-- > 0;) {
            const int a = widths_[l], b = widths_[l + 1];
            std::vector<double> dprev(a, 0.0);
            for (int r = 0; r < b; ++r) {
                g[b_off_[l] + r] += delta[r];
                for (int c = 0; c < a; ++c) {
                    g[w_off_[l] + r * a + c] += delta[r] * acts[l][c];
                    dprev[c] += delta[r] * x[w_off_[l] + r * a + c];
                }
            }
            if (l > 0)
                for (int c = 0; c < a; ++c) dprev[c] *= 1.0 - acts[l][c] * acts[l][c];
            delta.swap(dprev);
        }
    }

    std::vector<int> widths_;
    std::vector<Vector> inputs_;
    std::vector<Vector> targets_;
    int m_;
    std::size_t n_ = 0;
    std::vector<std::size_t> w_off_, b_off_;
};

/// Seeded instance: standard-normal inputs, targets produced by a fixed
/// random teacher network of the same shape plus small noise.
inline std::unique_ptr<MlpLeastSquares> make_mlp_least_squares(std::vector<int> widths,
                                                               int samples, int m,
                                                               std::uint64_t seed) {
    if (widths.size() < 3)
        throw std::invalid_argument("mlp_least_squares: needs at least one hidden layer");
    Rng rng(seed);
    std::vector<Vector> inputs;
    inputs.reserve(samples);
    for (int i = 0; i < samples; ++i) inputs.push_back(rng.normal_vector(widths.front()));

    std::vector<Vector> zero_targets(inputs.size(), Vector(widths.back(), 0.0));
    MlpLeastSquares teacher(widths, inputs, zero_targets, 1);
    Vector w(teacher.dim(), 0.0);
    {
        Rng wrng(seed ^ 0x9e3779b97f4a7c15ull);
        std::size_t off = 0;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
            const double s = 0.8 / std::sqrt(static_cast<double>(widths[l]));
            for (int i = 0; i < widths[l + 1] * widths[l]; ++i) w[off++] = s * wrng.normal();
            for (int i = 0; i < widths[l + 1]; ++i) w[off++] = 0.1 * wrng.normal();
        }
    }
    std::vector<Vector> targets;
    targets.reserve(inputs.size());
    for (const auto& z : inputs) {
        Vector y = teacher.predict(w, z);
        for (double& t : y) t += 0.05 * rng.normal();
        targets.push_back(std::move(y));
    }
    return std::make_unique<MlpLeastSquares>(std::move(widths), std::move(inputs),
                                             std::move(targets), m);
}

} // namespace blsd
