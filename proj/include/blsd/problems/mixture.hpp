#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "blsd/dual.hpp"
#include "blsd/objective.hpp"
#include "blsd/rng.hpp"

namespace blsd {

/// Layered Gaussian mixture likelihood on seeded synthetic data.
///
/// Each hidden layer holds K prototype/output pairs: the input is scored
/// against the prototypes with Gaussian responsibilities and the layer
/// emits the responsibility-weighted combination of the output vectors.
/// The last layer is a Gaussian mixture with trainable means and logit
/// weights, scored as negative log-likelihood against the hidden
/// representation plus a fixed seeded projection of the raw sample (the
/// skip term keeps the likelihood coupled to the data; without it the
/// representation cloud can contract onto the mixture atoms and the
/// objective decouples from the samples entirely). A small additive
/// likelihood floor keeps the log finite when all densities underflow.
///
/// Layer widths w_0..w_{L-1} describe the sample dimension and the hidden
/// activations; component_counts gives K per hidden layer plus the final
/// mixture size. Samples are partitioned into contiguous blocks, one per
/// objective component, and every f_j is normalized by the total sample
/// count so that the full objective is the mean per-sample loss.
///
/// Value and gradient are scalar-templated; the exact Hessian-vector
/// product runs the analytic gradient on dual numbers seeded with the
/// direction.
class LayeredGaussianMixture : public ComponentObjective {
public:
    static constexpr double likelihood_floor = 1e-12;

    LayeredGaussianMixture(std::vector<int> widths, std::vector<int> component_counts,
                           int samples, int m, std::uint64_t seed)
        : widths_(std::move(widths)), comps_(std::move(component_counts)),
          sample_count_(samples), m_(m) {
        if (widths_.size() < 2)
            throw std::invalid_argument("layered_gaussian_mixture: needs at least 2 layers");
        for (int w : widths_)
            if (w < 1) throw std::invalid_argument("layered_gaussian_mixture: degenerate layer width");
        if (comps_.size() != widths_.size())
            throw std::invalid_argument(
                "layered_gaussian_mixture: component_counts must have one entry per layer");
        for (int k : comps_)
            if (k < 1) throw std::invalid_argument("layered_gaussian_mixture: degenerate mixture size");
        if (m_ < 1) throw std::invalid_argument("layered_gaussian_mixture: components must be >= 1");
        if (sample_count_ < m_)
            throw std::invalid_argument("layered_gaussian_mixture: sample count below component count");

        // parameter layout: per hidden layer prototypes then outputs,
        // then final means, then final logits
        const std::size_t hidden = widths_.size() - 1;
        proto_off_.resize(hidden);
        out_off_.resize(hidden);
        std::size_t off = 0;
        for (std::size_t l = 0; l < hidden; ++l) {
            const std::size_t k = static_cast<std::size_t>(comps_[l]);
            proto_off_[l] = off;
            off += k * widths_[l];
            out_off_[l] = off;
            off += k * widths_[l + 1];
        }
        means_off_ = off;
        off += static_cast<std::size_t>(comps_.back()) * widths_.back();
        logits_off_ = off;
        off += static_cast<std::size_t>(comps_.back());
        n_ = off;

        generate_data(seed);
    }

    std::size_t dim() const override { return n_; }
    int components() const override { return m_; }
    int samples() const { return sample_count_; }
    const std::vector<int>& widths() const { return widths_; }

    double value(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = block_range(j);
        double s = 0.0;
        for (int i = lo; i < hi; ++i) s += forward_loss<double>(x.data(), sample(i), skip(i));
        return s / sample_count_;
    }

    Vector gradient(int j, const Vector& x) const override {
        check_point(j, x);
        auto [lo, hi] = block_range(j);
        std::vector<double> grad(n_, 0.0);
        for (int i = lo; i < hi; ++i)
            backprop_loss<double>(x.data(), sample(i), skip(i), grad.data());
        Vector g(grad.begin(), grad.end());
        vec::scale(g, 1.0 / sample_count_);
        return g;
    }

    bool has_exact_hvp() const override { return true; }

    Vector exact_hvp(int j, const Vector& x, const Vector& v) const override {
        check_point(j, x);
        if (v.size() != n_)
            throw std::invalid_argument("layered_gaussian_mixture: hvp dimension mismatch");
        std::vector<Dual> params(n_);
        for (std::size_t i = 0; i < n_; ++i) params[i] = Dual(x[i], v[i]);
        std::vector<Dual> grad(n_, Dual(0.0, 0.0));
        auto [lo, hi] = block_range(j);
        for (int i = lo; i < hi; ++i)
            backprop_loss<Dual>(params.data(), sample(i), skip(i), grad.data());
        Vector h(n_);
        for (std::size_t i = 0; i < n_; ++i) h[i] = grad[i].d / sample_count_;
        return h;
    }

private:
    const double* sample(int i) const { return data_.data() + static_cast<std::size_t>(i) * widths_[0]; }
    const double* skip(int i) const { return skip_.data() + static_cast<std::size_t>(i) * widths_.back(); }

    std::pair<int, int> block_range(int j) const {
        const int base = sample_count_ / m_;
        const int lo = (j - 1) * base;
        const int hi = (j == m_) ? sample_count_ : j * base;
        return {lo, hi};
    }

    // samples come from a fixed five-cluster Gaussian source with
    // overlapping clusters; the skip projection into the final scoring
    // space is part of the instance, not of the parameter vector
    void generate_data(std::uint64_t seed) {
        Rng rng(seed);
        const int w0 = widths_[0];
        const int wf = widths_.back();
        const int clusters = 5;
        std::vector<double> centers(static_cast<std::size_t>(clusters) * w0);
        for (double& c : centers) c = 2.0 * rng.normal();
        data_.resize(static_cast<std::size_t>(sample_count_) * w0);
        for (int i = 0; i < sample_count_; ++i) {
            const double* c = centers.data() + static_cast<std::size_t>(i % clusters) * w0;
            double* z = data_.data() + static_cast<std::size_t>(i) * w0;
            for (int d = 0; d < w0; ++d) z[d] = c[d] + rng.normal();
        }
        std::vector<double> proj(static_cast<std::size_t>(wf) * w0);
        for (double& p : proj) p = rng.normal() / std::sqrt(static_cast<double>(w0));
        skip_.assign(static_cast<std::size_t>(sample_count_) * wf, 0.0);
        for (int i = 0; i < sample_count_; ++i) {
            const double* z = sample(i);
            double* s = skip_.data() + static_cast<std::size_t>(i) * wf;
            for (int r = 0; r < wf; ++r)
                for (int d = 0; d < w0; ++d) s[r] += proj[static_cast<std::size_t>(r) * w0 + d] * z[d];
        }
    }

    template <typename T>
    T forward_loss(const T* params, const double* z, const double* sk) const {
        const std::size_t hidden = widths_.size() - 1;
        std::vector<T> h(z, z + widths_[0]);
        std::vector<T> e, r, hnext;
        for (std::size_t l = 0; l < hidden; ++l) {
            hidden_forward(params, l, h, e, r, hnext);
            h.swap(hnext);
        }
        return final_nll(params, h, sk);
    }

    // one responsibility layer: h -> sum_k softmax_k(-|h-m_k|^2/(2a)) u_k
    // (bandwidth grows with the input width so responsibilities stay
    // soft and the layer cannot trivially quantize its output)
    template <typename T>
    void hidden_forward(const T* params, std::size_t l, const std::vector<T>& h,
                        std::vector<T>& e, std::vector<T>& r, std::vector<T>& out) const {
        using std::exp;
        const int a = widths_[l], b = widths_[l + 1], k = comps_[l];
        const T* proto = params + proto_off_[l];
        const T* u = params + out_off_[l];
        e.assign(k, T(0.0));
        for (int c = 0; c < k; ++c) {
            T s(0.0);
            for (int i = 0; i < a; ++i) {
                const T d = h[i] - proto[c * a + i];
                s += d * d;
            }
            e[c] = T(-0.5 / a) * s;
        }
        T emax = e[0];
        for (int c = 1; c < k; ++c)
            if (e[c] > emax) emax = e[c];
        r.assign(k, T(0.0));
        T zsum(0.0);
        for (int c = 0; c < k; ++c) {
            r[c] = exp(e[c] - emax);
            zsum += r[c];
        }
        for (int c = 0; c < k; ++c) r[c] /= zsum;
        out.assign(b, T(0.0));
        for (int c = 0; c < k; ++c)
            for (int i = 0; i < b; ++i) out[i] += r[c] * u[c * b + i];
    }

    template <typename T>
    T final_nll(const T* params, const std::vector<T>& h, const double* sk) const {
        using std::exp;
        using std::log;
        const int c = widths_.back(), k = comps_.back();
        const T* means = params + means_off_;
        const T* logits = params + logits_off_;
        // mixture weights
        T rmax = logits[0];
        for (int q = 1; q < k; ++q)
            if (logits[q] > rmax) rmax = logits[q];
        std::vector<T> pi(k);
        T zsum(0.0);
        for (int q = 0; q < k; ++q) {
            pi[q] = exp(logits[q] - rmax);
            zsum += pi[q];
        }
        T acc(0.0);
        for (int q = 0; q < k; ++q) {
            pi[q] /= zsum;
            T s(0.0);
            for (int i = 0; i < c; ++i) {
                const T d = h[i] + T(sk[i]) - means[q * c + i];
                s += d * d;
            }
            acc += pi[q] * exp(T(-0.5) * s); // exponent <= 0, no overflow
        }
        const double norm_const = std::pow(2.0 * 3.14159265358979323846, -0.5 * c);
        return -log(T(norm_const) * acc + T(likelihood_floor));
    }

    /// analytic reverse pass; accumulates d(loss)/d(params) into grad
    template <typename T>
    T backprop_loss(const T* params, const double* z, const double* sk, T* grad) const {
        using std::exp;
        using std::log;
        const std::size_t hidden = widths_.size() - 1;

        // forward, keeping per-layer inputs and responsibilities
        std::vector<std::vector<T>> hs(hidden + 1), rs(hidden);
        hs[0].assign(z, z + widths_[0]);
        std::vector<T> e;
        for (std::size_t l = 0; l < hidden; ++l)
            hidden_forward(params, l, hs[l], e, rs[l], hs[l + 1]);

        // final layer forward; the mixture scores y = h + skip
        const int c = widths_.back(), k = comps_.back();
        const T* means = params + means_off_;
        const T* logits = params + logits_off_;
        const std::vector<T>& hf = hs[hidden];
        T rmax = logits[0];
        for (int q = 1; q < k; ++q)
            if (logits[q] > rmax) rmax = logits[q];
        std::vector<T> pi(k), ek(k);
        T zsum(0.0);
        for (int q = 0; q < k; ++q) {
            pi[q] = exp(logits[q] - rmax);
            zsum += pi[q];
        }
        T acc(0.0);
        for (int q = 0; q < k; ++q) {
            pi[q] /= zsum;
            T s(0.0);
            for (int i = 0; i < c; ++i) {
                const T d = hf[i] + T(sk[i]) - means[q * c + i];
                s += d * d;
            }
            ek[q] = exp(T(-0.5) * s);
            acc += pi[q] * ek[q];
        }
        const double norm_const = std::pow(2.0 * 3.14159265358979323846, -0.5 * c);
        const T p = T(norm_const) * acc;
        const T loss = -log(p + T(likelihood_floor));

        // final layer backward
        const T dA = -(T(norm_const) / (p + T(likelihood_floor)));
        std::vector<T> gh(c, T(0.0));
        std::vector<T> dpi(k);
        T dpi_dot(0.0);
        for (int q = 0; q < k; ++q) {
            const T dq = dA * pi[q] * ek[q];
            for (int i = 0; i < c; ++i) {
                const T d = hf[i] + T(sk[i]) - means[q * c + i];
                grad[means_off_ + q * c + i] += dq * d;
                gh[i] -= dq * d;
            }
            dpi[q] = dA * ek[q];
            dpi_dot += pi[q] * dpi[q];
        }
        for (int q = 0; q < k; ++q) grad[logits_off_ + q] += pi[q] * (dpi[q] - dpi_dot);

        // hidden layers backward, newest first
        for (std::size_t l = hidden; l-- > 0;) {
            const int a = widths_[l], b = widths_[l + 1], kk = comps_[l];
            const T* proto = params + proto_off_[l];
            const T* u = params + out_off_[l];
            const std::vector<T>& hin = hs[l];
            const std::vector<T>& r = rs[l];

            std::vector<T> gr(kk, T(0.0));
            for (int q = 0; q < kk; ++q) {
                for (int i = 0; i < b; ++i) {
                    grad[out_off_[l] + q * b + i] += r[q] * gh[i];
                    gr[q] += u[q * b + i] * gh[i];
                }
            }
            T gr_dot(0.0);
            for (int q = 0; q < kk; ++q) gr_dot += r[q] * gr[q];
            std::vector<T> ghin(a, T(0.0));
            for (int q = 0; q < kk; ++q) {
                const T ge = r[q] * (gr[q] - gr_dot) * T(1.0 / a); // bandwidth chain factor
                for (int i = 0; i < a; ++i) {
                    const T d = hin[i] - proto[q * a + i];
                    grad[proto_off_[l] + q * a + i] += ge * d;
                    ghin[i] -= ge * d;
                }
            }
            gh.swap(ghin);
        }
        return loss;
    }

    std::vector<int> widths_;
    std::vector<int> comps_;
    int sample_count_;
    int m_;
    std::size_t n_ = 0;
    std::vector<std::size_t> proto_off_, out_off_;
    std::size_t means_off_ = 0, logits_off_ = 0;
    std::vector<double> data_;
    std::vector<double> skip_; // per-sample fixed projection into the final space
};

} // namespace blsd
