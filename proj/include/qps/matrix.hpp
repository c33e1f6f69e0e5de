#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "qps/error.hpp"

namespace qps {

/// Dense row-major matrix with value semantics.
template <typename Real>
class BasicMatrix {
public:
    using value_type = Real;

    BasicMatrix() = default;
    BasicMatrix(std::size_t rows, std::size_t cols, Real fill = Real(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    BasicMatrix(std::initializer_list<std::initializer_list<Real>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw DimensionError("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static BasicMatrix identity(std::size_t n) {
        BasicMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = Real(1);
        return m;
    }

    static BasicMatrix diagonal(std::span<const Real> d) {
        BasicMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Real& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Real& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<Real> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const Real> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<const Real> data() const noexcept { return data_; }
    std::span<Real> data() noexcept { return data_; }

    BasicMatrix transpose() const {
        BasicMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                t(c, r) = (*this)(r, c);
        return t;
    }

    std::vector<Real> diag() const {
        std::vector<Real> d(std::min(rows_, cols_));
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = (*this)(i, i);
        return d;
    }

    Real trace() const {
        Real t(0);
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
            t += (*this)(i, i);
        return t;
    }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("matrix product: inner dimensions differ");
        BasicMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            auto dst = out.row(i);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Real aik = a(i, k);
                if (aik == Real(0))
                    continue;
                auto src = b.row(k);
                for (std::size_t j = 0; j < b.cols_; ++j)
                    dst[j] += aik * src[j];
            }
        }
        return out;
    }

    friend BasicMatrix operator-(const BasicMatrix& a, const BasicMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw DimensionError("matrix difference: shapes differ");
        BasicMatrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i)
            out.data_[i] -= b.data_[i];
        return out;
    }

    friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Real> data_;
};

using Matrix = BasicMatrix<double>;

template <typename Real>
Real max_abs(const BasicMatrix<Real>& m) {
    Real best(0);
    for (Real v : m.data())
        best = std::max<Real>(best, std::abs(v));
    return best;
}

template <typename Real>
Real max_abs_diff(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b) {
    return max_abs(a - b);
}

} // namespace qps
