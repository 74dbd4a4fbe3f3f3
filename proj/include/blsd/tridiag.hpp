#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace blsd {

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    int size() const { return static_cast<int>(diag.size()); }

    std::vector<double> multiply(const std::vector<double>& v) const {
        const int n = size();
        std::vector<double> r(n, 0.0);
        for (int i = 0; i < n; ++i) {
            r[i] = diag[i] * v[i];
            if (i > 0) r[i] += off[i - 1] * v[i - 1];
            if (i + 1 < n) r[i] += off[i] * v[i + 1];
        }
        return r;
    }

    /// max absolute row sum; cheap norm proxy
    double norm_inf() const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i) {
            double s = std::abs(diag[i]);
            if (i > 0) s += std::abs(off[i - 1]);
            if (i + 1 < size()) s += std::abs(off[i]);
            m = std::max(m, s);
        }
        return m;
    }
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

namespace detail {

/// number of eigenvalues of T strictly below x (Sturm sequence count)
inline int sturm_count_below(const SymTridiag& t, double x) {
    const int n = t.size();
    double bmax2 = 1.0;
    for (double b : t.off) bmax2 = std::max(bmax2, b * b);
    const double pivmin = std::numeric_limits<double>::min() * bmax2;
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        const double offsq = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
        d = (t.diag[i] - x) - (i > 0 ? offsq / d : 0.0);
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

/// dense LU solve of (T - shift I) y = b with partial pivoting; zero
/// pivots are nudged so exactly singular shifts still amplify the
/// target eigendirection
inline std::vector<double> shifted_solve(const SymTridiag& t, double shift,
                                         std::vector<double> b) {
    const int n = t.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        a[i][i] = t.diag[i] - shift;
        if (i > 0) a[i][i - 1] = t.off[i - 1];
        if (i + 1 < n) a[i][i + 1] = t.off[i];
    }
    const double floor_pivot =
        std::numeric_limits<double>::epsilon() * std::max(1.0, t.norm_inf());
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (p != c) {
            std::swap(a[p], a[c]);
            std::swap(b[p], b[c]);
        }
        if (std::abs(a[c][c]) < floor_pivot) a[c][c] = a[c][c] < 0.0 ? -floor_pivot : floor_pivot;
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> y(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r][k] * y[k];
        y[r] = s / a[r][r];
    }
    return y;
}

inline void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
}

/// canonical sign: first entry that is clearly nonzero is positive
inline void canonicalize_sign(std::vector<double>& v) {
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    for (double x : v) {
        if (std::abs(x) > 1e-11 * amax) {
            if (x < 0.0)
                for (double& e : v) e = -e;
            return;
        }
    }
}

} // namespace detail

/// Algebraically smallest eigenpair of a symmetric tridiagonal matrix:
/// the eigenvalue is isolated by bisection on the Sturm sequence count,
/// the eigenvector by inverse iteration, and the returned value is the
/// final Rayleigh quotient.
inline EigenPair tridiag_min_eigenpair(const SymTridiag& t) {
    const int n = t.size();
    if (n < 1) throw std::invalid_argument("tridiag_min_eigenpair: empty matrix");
    if (n == 1) return {t.diag[0], {1.0}};

    // Gershgorin enclosure
    double lo = t.diag[0], hi = t.diag[0];
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::sturm_count_below(t, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    const double shift = 0.5 * (lo + hi);

    std::vector<double> w(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const double scale = std::max(1.0, t.norm_inf());
    double mu = shift;
    for (int it = 0; it < 5; ++it) {
        w = detail::shifted_solve(t, shift, w);
        detail::normalize(w);
        const auto tw = t.multiply(w);
        mu = std::inner_product(w.begin(), w.end(), tw.begin(), 0.0);
        double res = 0.0;
        for (int i = 0; i < n; ++i) res += (tw[i] - mu * w[i]) * (tw[i] - mu * w[i]);
        if (std::sqrt(res) <= 1e-13 * scale) break;
    }
    detail::canonicalize_sign(w);
    return {mu, w};
}

/// All eigenpairs of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns values ascending; vectors[k] pairs with values[k].
struct SmallEigenDecomposition {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

inline SmallEigenDecomposition jacobi_eigensolve(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;

    double fro = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro += a[i][j] * a[i][j];
    const double stop = 1e-30 * std::max(fro, 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double offsq = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) offsq += 2.0 * a[p][q] * a[p][q];
        if (offsq <= stop) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double tt = (tau >= 0.0 ? 1.0 : -1.0) /
                                  (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double s = tt * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] < a[y][y]; });
    SmallEigenDecomposition out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k) {
        out.values[k] = a[order[k]][order[k]];
        for (int i = 0; i < n; ++i) out.vectors[k][i] = v[i][order[k]];
    }
    return out;
}

enum class TridiagFilter { none, drop_negative_diagonal };

struct TridiagSolveResult {
    std::vector<double> y;   // full length, zeros at dropped indices
    std::vector<int> kept;   // retained indices, ascending, 0-based
};

/// Solve T y = rhs through the eigendecomposition of T, truncating
/// eigenvalues below pinv_tol relative to the largest magnitude. With
/// drop_negative_diagonal the solve is restricted to the principal
/// submatrix on the indices whose diagonal entry is nonnegative; the
/// result is padded with zeros elsewhere.
inline TridiagSolveResult tridiag_solve(const SymTridiag& t, const std::vector<double>& rhs,
                                        TridiagFilter filter, double pinv_tol = 1e-12) {
    const int n = t.size();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("tridiag_solve: rhs length mismatch");

    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
        if (filter == TridiagFilter::none || t.diag[i] >= 0.0) kept.push_back(i);
    TridiagSolveResult out;
    out.y.assign(n, 0.0);
    out.kept = kept;
    if (kept.empty()) return out;

    const int k = static_cast<int>(kept.size());
    std::vector<std::vector<double>> sub(k, std::vector<double>(k, 0.0));
    std::vector<double> rsub(k);
    for (int a = 0; a < k; ++a) {
        sub[a][a] = t.diag[kept[a]];
        if (a + 1 < k && kept[a + 1] == kept[a] + 1) {
            sub[a][a + 1] = t.off[kept[a]];
            sub[a + 1][a] = t.off[kept[a]];
        }
        rsub[a] = rhs[kept[a]];
    }

    const auto eig = jacobi_eigensolve(std::move(sub));
    double lam_max = 0.0;
    for (double lam : eig.values) lam_max = std::max(lam_max, std::abs(lam));
    const double cutoff = pinv_tol * lam_max;

    bool any = false;
    std::vector<double> ysub(k, 0.0);
    for (int e = 0; e < k; ++e) {
        if (std::abs(eig.values[e]) <= cutoff || eig.values[e] == 0.0) continue;
        any = true;
        double proj = 0.0;
        for (int i = 0; i < k; ++i) proj += eig.vectors[e][i] * rsub[i];
        const double coef = proj / eig.values[e];
        for (int i = 0; i < k; ++i) ysub[i] += coef * eig.vectors[e][i];
    }
    if (!any && filter == TridiagFilter::none)
        throw SingularMatrixError("tridiag_solve: numerically singular T");

    for (int a = 0; a < k; ++a) out.y[kept[a]] = ysub[a];
    return out;
}

} // namespace blsd
