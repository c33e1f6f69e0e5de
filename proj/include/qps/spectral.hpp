#pragma once

// Real-symmetric eigendecomposition and Moore-Penrose pseudo-inverse.
//
// Two symmetric eigensolvers are provided: cyclic Jacobi (accurate, simple,
// O(N^3) per sweep) and Householder tridiagonalization followed by implicit
// QL (used for large matrices). Both run a fixed iteration schedule, so the
// output is a deterministic function of the input bits. The thin SVD is a
// one-sided (Hestenes) Jacobi iteration that never forms A'A.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qps/error.hpp"
#include "qps/matrix.hpp"

namespace qps {

enum class EigenMethod {
    Automatic,  // Jacobi up to kJacobiMaxSize, tridiagonal QL above
    Jacobi,
    TridiagonalQL,
};

/// Pivot schedule of the cyclic Jacobi sweep.
enum class SweepOrder {
    RowCyclic,     // (0,1), (0,2), ..., (1,2), ...
    ReverseCyclic, // (N-2,N-1), (N-3,N-1), (N-3,N-2), ...
};

inline constexpr std::size_t kJacobiMaxSize = 128;

struct EigenOptions {
    EigenMethod method = EigenMethod::Automatic;
    SweepOrder order = SweepOrder::RowCyclic;
    int max_sweeps = 64;
    /// Relative asymmetry accepted on input: |a_ij - a_ji| <= tol * max|a|.
    double symmetry_tolerance = 1e-10;
    /// Eigenvalues <= rank_tolerance * max(sigma) count as zero; negative
    /// means the default N * machine epsilon.
    double rank_tolerance = -1.0;
};

template <typename Real>
struct BasicEigenDecomposition {
    BasicMatrix<Real> U;        // eigenvectors in columns
    std::vector<Real> sigma;    // descending
    std::size_t rank = 0;       // eigenvalues above tolerance_used * max(sigma)
    Real tolerance_used = 0;
    int sweeps = 0;             // Jacobi sweeps or QL iterations
};

using EigenDecomposition = BasicEigenDecomposition<double>;

namespace detail {

template <typename Real>
Real default_tolerance(std::size_t n) {
    return static_cast<Real>(std::max<std::size_t>(n, 1)) * std::numeric_limits<Real>::epsilon();
}

template <typename Real>
void check_symmetric(const BasicMatrix<Real>& a, double tol) {
    if (a.rows() != a.cols())
        throw DimensionError("eig_sym: matrix is not square");
    const Real scale = std::max<Real>(Real(1), max_abs(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > static_cast<Real>(tol) * scale)
                throw DimensionError("eig_sym: matrix is not symmetric within tolerance");
}

template <typename Real>
int jacobi_sweeps(BasicMatrix<Real>& a, BasicMatrix<Real>& v, SweepOrder order, int max_sweeps) {
    const std::size_t n = a.rows();
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real norm2(0);
    for (Real x : a.data())
        norm2 += x * x;
    const Real target = eps * eps * norm2;

    auto rotate = [&](std::size_t p, std::size_t q) {
        const Real apq = a(p, q);
        if (apq == Real(0))
            return;
        const Real app = a(p, p);
        const Real aqq = a(q, q);
        const Real theta = (aqq - app) / (Real(2) * apq);
        Real t = Real(1) / (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
        if (theta < Real(0))
            t = -t;
        const Real c = Real(1) / std::sqrt(t * t + Real(1));
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q)
                continue;
            const Real akp = a(k, p);
            const Real akq = a(k, q);
            a(k, p) = a(p, k) = c * akp - s * akq;
            a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = Real(0);
        for (std::size_t k = 0; k < n; ++k) {
            const Real vkp = v(k, p);
            const Real vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
        }
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Real off(0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += a(i, j) * a(i, j);
        if (off <= target)
            return sweep;
        if (order == SweepOrder::RowCyclic) {
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                    rotate(p, q);
        } else {
            for (std::size_t p = n - 1; p-- > 0;)
                for (std::size_t q = n - 1; q > p; --q)
                    rotate(p, q);
        }
    }
    throw ConvergenceError("Jacobi eigensolver did not converge in " +
                           std::to_string(max_sweeps) + " sweeps");
}

/// Householder reduction to tridiagonal form. On return z holds the
/// accumulated orthogonal transform, d the diagonal and e the subdiagonal
/// (e[0] = 0).
template <typename Real>
void tridiagonalize(BasicMatrix<Real>& z, std::vector<Real>& d, std::vector<Real>& e) {
    const std::size_t n = z.rows();
    d.assign(n, Real(0));
    e.assign(n, Real(0));
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t l = i - 1;
        Real h(0), scale(0);
        if (l > 0) {
            for (std::size_t k = 0; k < i; ++k)
                scale += std::abs(z(i, k));
            if (scale == Real(0)) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k < i; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                Real f = z(i, l);
                Real g = f >= Real(0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = Real(0);
                for (std::size_t j = 0; j < i; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = Real(0);
                    for (std::size_t k = 0; k <= j; ++k)
                        g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k < i; ++k)
                        g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const Real hh = f / (h + h);
                for (std::size_t j = 0; j < i; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        z(j, k) -= (f * e[k] + g * z(i, k));
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = Real(0);
    e[0] = Real(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != Real(0)) {
            for (std::size_t j = 0; j < i; ++j) {
                Real g(0);
                for (std::size_t k = 0; k < i; ++k)
                    g += z(i, k) * z(k, j);
                for (std::size_t k = 0; k < i; ++k)
                    z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = Real(1);
        for (std::size_t j = 0; j < i; ++j)
            z(j, i) = z(i, j) = Real(0);
    }
}

/// Implicit QL on a tridiagonal matrix. `zt` holds the transform with
/// eigenvectors as ROWS (transposed) so each rotation touches two
/// contiguous rows. Returns the total iteration count.
template <typename Real>
int tridiagonal_ql(std::vector<Real>& d, std::vector<Real>& e, BasicMatrix<Real>& zt) {
    const std::size_t n = d.size();
    const Real eps = std::numeric_limits<Real>::epsilon();
    constexpr int kMaxIterations = 60;
    int total = 0;
    for (std::size_t i = 1; i < n; ++i)
        e[i - 1] = e[i];
    e[n - 1] = Real(0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const Real dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd)
                    break;
            }
            if (m != l) {
                if (iter++ == kMaxIterations)
                    throw ConvergenceError("tridiagonal QL did not converge");
                ++total;
                Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
                Real r = std::hypot(g, Real(1));
                g = d[m] - d[l] + e[l] / (g + (g >= Real(0) ? std::abs(r) : -std::abs(r)));
                Real s(1), c(1), p(0);
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    Real f = s * e[i];
                    const Real b = c * e[i];
                    e[i + 1] = (r = std::hypot(f, g));
                    if (r == Real(0)) {
                        d[i + 1] -= p;
                        e[m] = Real(0);
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + Real(2) * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    auto zi = zt.row(i);
                    auto zi1 = zt.row(i + 1);
                    for (std::size_t k = 0; k < n; ++k) {
                        f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
                if (underflow)
                    continue;
                d[l] -= p;
                e[l] = g;
                e[m] = Real(0);
            }
        } while (m != l);
    }
    return total;
}

template <typename Real>
void sort_descending(std::vector<Real>& values, BasicMatrix<Real>& vectors_in_columns) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<Real> sorted(n);
    BasicMatrix<Real> v(vectors_in_columns.rows(), n);
    for (std::size_t c = 0; c < n; ++c) {
        sorted[c] = values[idx[c]];
        for (std::size_t r = 0; r < v.rows(); ++r)
            v(r, c) = vectors_in_columns(r, idx[c]);
    }
    values = std::move(sorted);
    vectors_in_columns = std::move(v);
}

template <typename Real>
std::size_t count_above(std::span<const Real> values, Real rel_tol) {
    Real top(0);
    for (Real v : values)
        top = std::max(top, v);
    if (top <= Real(0))
        return 0;
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](Real v) { return v > rel_tol * top; }));
}

} // namespace detail

/// Eigendecomposition A = U diag(sigma) U' of a real symmetric matrix,
/// eigenvalues sorted in descending order.
template <typename Real>
BasicEigenDecomposition<Real> eig_sym(const BasicMatrix<Real>& a, const EigenOptions& opt = {}) {
    detail::check_symmetric(a, opt.symmetry_tolerance);
    const std::size_t n = a.rows();
    BasicEigenDecomposition<Real> out;
    if (n == 0)
        return out;

    EigenMethod method = opt.method;
    if (method == EigenMethod::Automatic)
        method = n <= kJacobiMaxSize ? EigenMethod::Jacobi : EigenMethod::TridiagonalQL;

    if (method == EigenMethod::Jacobi || n == 1) {
        // Work on the symmetrized copy so tiny input asymmetry cannot leak.
        BasicMatrix<Real> work(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                work(i, j) = (a(i, j) + a(j, i)) / Real(2);
        out.U = BasicMatrix<Real>::identity(n);
        out.sweeps = detail::jacobi_sweeps(work, out.U, opt.order, opt.max_sweeps);
        out.sigma = work.diag();
    } else {
        BasicMatrix<Real> z(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                z(i, j) = (a(i, j) + a(j, i)) / Real(2);
        std::vector<Real> d, e;
        detail::tridiagonalize(z, d, e);
        BasicMatrix<Real> zt = z.transpose();
        out.sweeps = detail::tridiagonal_ql(d, e, zt);
        out.U = zt.transpose();
        out.sigma = std::move(d);
    }
    detail::sort_descending(out.sigma, out.U);
    out.tolerance_used = opt.rank_tolerance < 0 ? detail::default_tolerance<Real>(n)
                                                : static_cast<Real>(opt.rank_tolerance);
    out.rank = detail::count_above<Real>(out.sigma, out.tolerance_used);
    return out;
}

/// Entry-wise reciprocal of the values above tol * max(sigma); zero elsewhere.
template <typename Real>
std::vector<Real> pinv_diag(std::span<const Real> sigma, Real tol) {
    Real top(0);
    for (Real s : sigma)
        top = std::max(top, s);
    std::vector<Real> out(sigma.size(), Real(0));
    if (top <= Real(0))
        return out;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (sigma[i] > tol * top)
            out[i] = Real(1) / sigma[i];
    return out;
}

inline std::vector<double> pinv_diag(const std::vector<double>& sigma, double tol) {
    return pinv_diag<double>(std::span<const double>(sigma), tol);
}

/// U diag(sigma^+) U' from an eigendecomposition.
template <typename Real>
BasicMatrix<Real> pinv_from_eigen(const BasicEigenDecomposition<Real>& eig) {
    const std::size_t n = eig.U.rows();
    const auto inv = pinv_diag<Real>(std::span<const Real>(eig.sigma), eig.tolerance_used);
    BasicMatrix<Real> out(n, n);
    for (std::size_t k = 0; k < inv.size(); ++k) {
        if (inv[k] == Real(0))
            continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Real uik = eig.U(i, k) * inv[k];
            if (uik == Real(0))
                continue;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < n; ++j)
                dst[j] += uik * eig.U(j, k);
        }
    }
    return out;
}

/// Thin SVD A = U diag(sigma) V' with r = min(rows, cols) columns in U
/// and V; sigma descending.
template <typename Real>
struct BasicSvd {
    BasicMatrix<Real> U;
    std::vector<Real> sigma;
    BasicMatrix<Real> V;
    int sweeps = 0;
};

using Svd = BasicSvd<double>;

namespace detail {

/// One-sided Jacobi on the columns of A (rows >= cols). `cols_major`
/// holds A' (each row is one column of A) and is orthogonalized in place;
/// `vt` accumulates V' the same way.
template <typename Real>
int hestenes(BasicMatrix<Real>& cols_major, BasicMatrix<Real>& vt, int max_sweeps) {
    const std::size_t k = cols_major.rows();
    const std::size_t len = cols_major.cols();
    const Real eps = std::numeric_limits<Real>::epsilon();
    // columns with squared norm at or below this count as zero
    Real total(0);
    for (Real x : cols_major.data())
        total += x * x;
    const Real negligible = eps * eps * total;
    const Real orth_tol = eps * std::sqrt(static_cast<Real>(std::max<std::size_t>(len, 1)));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                auto ap = cols_major.row(p);
                auto aq = cols_major.row(q);
                Real alpha(0), beta(0), gamma(0);
                for (std::size_t i = 0; i < len; ++i) {
                    alpha += ap[i] * ap[i];
                    beta += aq[i] * aq[i];
                    gamma += ap[i] * aq[i];
                }
                if (alpha <= negligible || beta <= negligible || gamma == Real(0) ||
                    std::abs(gamma) <= orth_tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const Real zeta = (beta - alpha) / (Real(2) * gamma);
                Real t = Real(1) / (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
                if (zeta < Real(0))
                    t = -t;
                const Real c = Real(1) / std::sqrt(Real(1) + t * t);
                const Real s = c * t;
                for (std::size_t i = 0; i < len; ++i) {
                    const Real x = ap[i];
                    const Real y = aq[i];
                    ap[i] = c * x - s * y;
                    aq[i] = s * x + c * y;
                }
                auto vp = vt.row(p);
                auto vq = vt.row(q);
                for (std::size_t i = 0; i < k; ++i) {
                    const Real x = vp[i];
                    const Real y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
        if (!rotated)
            return sweep;
    }
    throw ConvergenceError("one-sided Jacobi SVD did not converge in " +
                           std::to_string(max_sweeps) + " sweeps");
}

template <typename Real>
BasicSvd<Real> svd_tall(const BasicMatrix<Real>& a, int max_sweeps) {
    const std::size_t rows = a.rows();
    const std::size_t k = a.cols();
    BasicMatrix<Real> work = a.transpose();
    BasicMatrix<Real> vt = BasicMatrix<Real>::identity(k);
    BasicSvd<Real> out;
    out.sweeps = hestenes(work, vt, max_sweeps);

    std::vector<Real> norms(k);
    for (std::size_t j = 0; j < k; ++j) {
        Real s(0);
        for (Real x : work.row(j))
            s += x * x;
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    out.U = BasicMatrix<Real>(rows, k);
    out.V = BasicMatrix<Real>(k, k);
    out.sigma.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t j = idx[c];
        out.sigma[c] = norms[j];
        if (norms[j] > Real(0))
            for (std::size_t r = 0; r < rows; ++r)
                out.U(r, c) = work(j, r) / norms[j];
        for (std::size_t r = 0; r < k; ++r)
            out.V(r, c) = vt(j, r);
    }
    return out;
}

} // namespace detail

template <typename Real>
BasicSvd<Real> svd_thin(const BasicMatrix<Real>& a, int max_sweeps = 80) {
    if (a.rows() >= a.cols())
        return detail::svd_tall(a, max_sweeps);
    auto t = detail::svd_tall(a.transpose(), max_sweeps);
    std::swap(t.U, t.V);
    return t;
}

template <typename Real>
struct BasicPseudoInverse {
    BasicMatrix<Real> matrix;  // cols x rows of the input
    std::vector<Real> sigma_plus;
    std::size_t rank = 0;
    Real tolerance_used = 0;
};

using PseudoInverse = BasicPseudoInverse<double>;

/// A+ = V diag(sigma^+) U' from the thin SVD; singular values at or below
/// tol * max(sigma) are treated as zero (tol < 0: max(rows, cols) * eps).
template <typename Real>
BasicPseudoInverse<Real> pinv(const BasicMatrix<Real>& a, Real tol = Real(-1)) {
    const auto svd = svd_thin(a);
    BasicPseudoInverse<Real> out;
    out.tolerance_used = tol < Real(0) ? detail::default_tolerance<Real>(std::max(a.rows(), a.cols()))
                                       : tol;
    out.sigma_plus = pinv_diag<Real>(std::span<const Real>(svd.sigma), out.tolerance_used);
    out.rank = static_cast<std::size_t>(
        std::count_if(out.sigma_plus.begin(), out.sigma_plus.end(), [](Real v) { return v != Real(0); }));
    out.matrix = BasicMatrix<Real>(a.cols(), a.rows());
    for (std::size_t k = 0; k < out.sigma_plus.size(); ++k) {
        const Real inv = out.sigma_plus[k];
        if (inv == Real(0))
            continue;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const Real vik = svd.V(i, k) * inv;
            if (vik == Real(0))
                continue;
            auto dst = out.matrix.row(i);
            for (std::size_t j = 0; j < a.rows(); ++j)
                dst[j] += vik * svd.U(j, k);
        }
    }
    return out;
}

} // namespace qps
