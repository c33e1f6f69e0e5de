#pragma once

// Density matrix of the quantum probability space reproducing a set of
// marginals:
//
//   J = K'K = U S U'            (eigendecomposition, S has N - m zeros)
//   W = U S^+ U' K'             (= K^+)
//   R = W diag(lambda) W'       (so K R K' = diag(lambda) when rank K = m)
//   rho = R / tr(R)
//
// The diagonal of rho is the joint distribution over the 2^n outcomes.
// K[i] R K[i]' restores marginal i.
//
// Two routes compute it. build_density follows the chain above through the
// N x N eigenproblem and materializes R (n <= 10). diag_fast takes W as the
// pseudo-inverse of K from a thin SVD of the m x N matrix, never forming J,
// and yields diag(R) and the restored marginals only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qps/error.hpp"
#include "qps/event_matrix.hpp"
#include "qps/marginals.hpp"
#include "qps/matrix.hpp"
#include "qps/spectral.hpp"

namespace qps {

struct DensityOptions {
    /// Relative rank tolerance; negative selects the default N * eps.
    double rank_tolerance = -1.0;
    EigenOptions eigen{};
};

struct DensityResult {
    int n = 0;
    std::size_t m = 0;
    std::size_t N = 0;
    std::vector<double> lambda;

    std::optional<Matrix> R;   // dense, n <= kMaxDenseVariables via build_density
    std::optional<Matrix> rho;
    Matrix W;                  // N x m, R = W diag(lambda) W'

    std::vector<double> diag_R;
    double trace_R = 0.0;
    std::vector<double> joint;        // diag(rho)
    std::vector<double> restored;     // K[i] R K[i]'
    std::vector<double> restored_rho; // K[i] rho K[i]'
    double residual = 0.0;            // max |restored - lambda|
    double residual_rho = 0.0;        // max |restored_rho - lambda|
    std::size_t effective_rank = 0;
    double tolerance_used = 0.0;

    bool full_rank() const { return effective_rank == m; }
};

namespace detail {

inline void check_inputs(const EventMatrix& k, const LambdaVector& lam) {
    if (lam.n != k.n || lam.size() != k.m)
        throw DimensionError("lambda has " + std::to_string(lam.size()) + " entries for an event matrix with " +
                             std::to_string(k.m) + " rows");
    bool any = false;
    for (double v : lam.entries) {
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("lambda entries must be finite and non-negative");
        any = any || v > 0.0;
    }
    if (!any)
        throw DegenerateError("all marginals are zero: tr(R) = 0 and rho is undefined");
}

/// Sum of the entries of a dense matrix over rows and columns in `idx`.
inline double block_sum(const Matrix& a, const std::vector<std::uint32_t>& idx) {
    double s = 0.0;
    for (auto r : idx) {
        const auto row = a.row(r);
        for (auto c : idx)
            s += row[c];
    }
    return s;
}

/// (K W)[r, i] = sum over b in row r of W[b, i].
inline Matrix event_times(const EventMatrix& k, const Matrix& w) {
    Matrix kw(k.m, w.cols());
    for (std::size_t r = 0; r < k.m; ++r) {
        auto dst = kw.row(r);
        for (auto b : k.rows[r].columns) {
            const auto src = w.row(b);
            for (std::size_t i = 0; i < w.cols(); ++i)
                dst[i] += src[i];
        }
    }
    return kw;
}

inline void finish(DensityResult& out, const EventMatrix& k) {
    out.trace_R = 0.0;
    for (double d : out.diag_R)
        out.trace_R += d;
    if (!(out.trace_R > 0.0))
        throw DegenerateError("tr(R) is zero: rho is undefined for this instance");
    out.joint.resize(out.N);
    for (std::size_t b = 0; b < out.N; ++b)
        out.joint[b] = out.diag_R[b] / out.trace_R;
    if (out.R) {
        out.restored.resize(k.m);
        for (std::size_t r = 0; r < k.m; ++r)
            out.restored[r] = block_sum(*out.R, k.rows[r].columns);
        Matrix rho = *out.R;
        for (double& x : rho.data())
            x /= out.trace_R;
        out.rho = std::move(rho);
    }
    out.restored_rho.resize(k.m);
    out.residual = 0.0;
    out.residual_rho = 0.0;
    for (std::size_t r = 0; r < k.m; ++r) {
        out.restored_rho[r] = out.restored[r] / out.trace_R;
        out.residual = std::max(out.residual, std::abs(out.restored[r] - out.lambda[r]));
        out.residual_rho = std::max(out.residual_rho, std::abs(out.restored_rho[r] - out.lambda[r]));
    }
}

} // namespace detail

/// J = K'K as a dense N x N matrix (entry (a, b) counts rows holding both).
inline Matrix gram_matrix(const EventMatrix& k) {
    if (k.n > kMaxDenseVariables)
        throw SizeError("K'K is only formed for n <= " + std::to_string(kMaxDenseVariables));
    Matrix j(k.N, k.N);
    for (const auto& row : k.rows)
        for (auto a : row.columns) {
            auto dst = j.row(a);
            for (auto b : row.columns)
                dst[b] += 1.0;
        }
    return j;
}

/// Builds R, rho and the derived quantities from a given eigendecomposition
/// of J. Any orthonormal eigenbasis gives the same result.
inline DensityResult assemble_density(const EventMatrix& k, const LambdaVector& lam,
                                      const EigenDecomposition& eig) {
    detail::check_inputs(k, lam);
    if (eig.U.rows() != k.N)
        throw DimensionError("eigendecomposition does not match the event matrix");
    DensityResult out;
    out.n = k.n;
    out.m = k.m;
    out.N = k.N;
    out.lambda = lam.entries;
    out.effective_rank = eig.rank;
    out.tolerance_used = eig.tolerance_used;

    const Matrix jp = pinv_from_eigen(eig);
    out.W = Matrix(k.N, k.m);
    for (std::size_t a = 0; a < k.N; ++a) {
        const auto src = jp.row(a);
        auto dst = out.W.row(a);
        for (std::size_t i = 0; i < k.m; ++i) {
            double s = 0.0;
            for (auto b : k.rows[i].columns)
                s += src[b];
            dst[i] = s;
        }
    }

    Matrix r(k.N, k.N);
    std::vector<double> scaled(k.m);
    for (std::size_t a = 0; a < k.N; ++a) {
        const auto wa = out.W.row(a);
        for (std::size_t i = 0; i < k.m; ++i)
            scaled[i] = wa[i] * lam.entries[i];
        for (std::size_t b = a; b < k.N; ++b) {
            const auto wb = out.W.row(b);
            double s = 0.0;
            for (std::size_t i = 0; i < k.m; ++i)
                s += scaled[i] * wb[i];
            r(a, b) = s;
            r(b, a) = s;
        }
    }
    out.diag_R = r.diag();
    out.R = std::move(r);
    detail::finish(out, k);
    return out;
}

/// diag(R) and restored marginals through K^+ from a thin SVD of K.
inline DensityResult diag_fast(const EventMatrix& k, const LambdaVector& lam,
                               const DensityOptions& opt = {}) {
    check_variable_count(k.n);
    detail::check_inputs(k, lam);
    DensityResult out;
    out.n = k.n;
    out.m = k.m;
    out.N = k.N;
    out.lambda = lam.entries;

    Matrix kd(k.m, k.N);
    for (std::size_t r = 0; r < k.m; ++r)
        for (auto c : k.rows[r].columns)
            kd(r, c) = 1.0;
    const double tol = opt.rank_tolerance < 0 ? detail::default_tolerance<double>(k.N) : opt.rank_tolerance;
    const auto kp = pinv(kd, tol);
    out.W = kp.matrix;
    out.effective_rank = kp.rank;
    out.tolerance_used = kp.tolerance_used;

    out.diag_R.assign(k.N, 0.0);
    for (std::size_t b = 0; b < k.N; ++b) {
        const auto w = out.W.row(b);
        double s = 0.0;
        for (std::size_t i = 0; i < k.m; ++i)
            s += w[i] * w[i] * lam.entries[i];
        out.diag_R[b] = s;
    }

    const Matrix kw = detail::event_times(k, out.W);
    out.restored.assign(k.m, 0.0);
    for (std::size_t r = 0; r < k.m; ++r) {
        const auto row = kw.row(r);
        double s = 0.0;
        for (std::size_t i = 0; i < k.m; ++i)
            s += row[i] * row[i] * lam.entries[i];
        out.restored[r] = s;
    }
    detail::finish(out, k);
    return out;
}

/// Full construction. Dense R and rho through the eigendecomposition of J
/// for n <= kMaxDenseVariables; above that it defers to diag_fast.
inline DensityResult build_density(const EventMatrix& k, const LambdaVector& lam,
                                   const DensityOptions& opt = {}) {
    check_variable_count(k.n);
    detail::check_inputs(k, lam);
    if (k.n > kMaxDenseVariables)
        return diag_fast(k, lam, opt);
    EigenOptions eo = opt.eigen;
    eo.rank_tolerance = opt.rank_tolerance;
    return assemble_density(k, lam, eig_sym(gram_matrix(k), eo));
}

enum class FormScale { R, Rho };

/// Quadratic form x' R x (or x' rho x) of the join vector x of `row`, the
/// quantity that restores a marginal when x is a row of K.
inline double quadratic_form(const DensityResult& res, const SparseRow& row,
                             FormScale scale = FormScale::R) {
    if (row.width != res.N)
        throw DimensionError("row width does not match the outcome space");
    double s = 0.0;
    if (res.R) {
        s = detail::block_sum(*res.R, row.columns);
    } else {
        for (std::size_t i = 0; i < res.m; ++i) {
            double proj = 0.0;
            for (auto b : row.columns)
                proj += res.W(b, i);
            s += proj * proj * res.lambda[i];
        }
    }
    return scale == FormScale::R ? s : s / res.trace_R;
}

/// Probability that rho assigns to the subspace spanned by the basis
/// vectors selected in `subspace`: tr(P rho) with P the orthogonal
/// projector, i.e. the sum of the selected diagonal entries. Gives 0 for
/// the null subspace, 1 for the whole space, and is additive over
/// disjoint selections.
inline double gleason_probability(const DensityResult& res, const SparseRow& subspace) {
    if (subspace.width != res.N)
        throw DimensionError("subspace width does not match the outcome space");
    double s = 0.0;
    for (auto b : subspace.columns)
        s += res.joint[b];
    return s;
}

} // namespace qps
