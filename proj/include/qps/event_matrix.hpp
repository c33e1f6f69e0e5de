#pragma once

// The m x N binary event matrix K. Column l is the outcome whose n-bit
// big-endian expansion b_1..b_n (variable 1 is the most significant bit)
// gives the values of A_1..A_n; column 0 is "all A_i false". Rows 1..n
// mark the outcomes of not A_i, the remaining rows mark A_i A_j in
// lexicographic (i, j) order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qps/error.hpp"
#include "qps/marginals.hpp"
#include "qps/matrix.hpp"

namespace qps {

inline constexpr int kMaxDenseVariables = 10;

/// Outcome column of the joint space together with its bit string.
struct OutcomeIndex {
    int n = 0;
    std::uint32_t column = 0;

    /// Value (0/1) of variable i, 1-based.
    int bit(int i) const { return static_cast<int>((column >> (n - i)) & 1u); }

    std::string bits() const {
        std::string s(static_cast<std::size_t>(n), '0');
        for (int i = 1; i <= n; ++i)
            s[static_cast<std::size_t>(i - 1)] = bit(i) ? '1' : '0';
        return s;
    }

    static OutcomeIndex from_bits(std::string_view bits) {
        OutcomeIndex o{static_cast<int>(bits.size()), 0};
        for (char c : bits) {
            if (c != '0' && c != '1')
                throw InputError("outcome bit string must be binary");
            o.column = (o.column << 1) | static_cast<std::uint32_t>(c - '0');
        }
        return o;
    }
};

/// Indicator row stored as the sorted list of columns holding 1.
struct SparseRow {
    std::size_t width = 0;
    std::vector<std::uint32_t> columns;

    std::size_t ones() const { return columns.size(); }

    std::vector<double> dense() const {
        std::vector<double> v(width, 0.0);
        for (auto c : columns)
            v[c] = 1.0;
        return v;
    }

    std::string to_string() const {
        std::string s(width, '0');
        for (auto c : columns)
            s[c] = '1';
        return s;
    }

    static SparseRow from_string(std::string_view bits) {
        SparseRow r{bits.size(), {}};
        for (std::size_t c = 0; c < bits.size(); ++c) {
            if (bits[c] == '1')
                r.columns.push_back(static_cast<std::uint32_t>(c));
            else if (bits[c] != '0')
                throw InputError("indicator row must be binary");
        }
        return r;
    }

    friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

/// Join of two indicator rows: the smallest subspace spanned by both, i.e.
/// the union of their basis columns.
inline SparseRow join_rows(const SparseRow& a, const SparseRow& b) {
    if (a.width != b.width)
        throw DimensionError("join_rows: rows have different widths");
    SparseRow out{a.width, {}};
    out.columns.reserve(a.columns.size() + b.columns.size());
    std::set_union(a.columns.begin(), a.columns.end(), b.columns.begin(), b.columns.end(),
                   std::back_inserter(out.columns));
    return out;
}

inline SparseRow complement(const SparseRow& r) {
    SparseRow out{r.width, {}};
    out.columns.reserve(r.width - r.columns.size());
    std::size_t k = 0;
    for (std::uint32_t c = 0; c < r.width; ++c) {
        if (k < r.columns.size() && r.columns[k] == c)
            ++k;
        else
            out.columns.push_back(c);
    }
    return out;
}

struct EventMatrix {
    int n = 0;
    std::size_t m = 0;
    std::size_t N = 0;
    std::vector<SparseRow> rows;

    const SparseRow& row(std::size_t k) const { return rows.at(k); }

    /// Dense 0/1 copy; refused above kMaxDenseVariables.
    Matrix dense() const {
        if (n > kMaxDenseVariables)
            throw SizeError("dense event matrix only for n <= " +
                            std::to_string(kMaxDenseVariables));
        Matrix k(m, N);
        for (std::size_t r = 0; r < m; ++r)
            for (auto c : rows[r].columns)
                k(r, c) = 1.0;
        return k;
    }

    /// One line of 0/1 characters per row.
    std::string ascii() const {
        std::string out;
        out.reserve(m * (N + 1));
        for (const auto& r : rows) {
            out += r.to_string();
            out += '\n';
        }
        return out;
    }

    /// "row,column" per nonzero; rows are 1-based, columns are outcome indices.
    std::string triplets() const {
        std::ostringstream os;
        for (std::size_t r = 0; r < m; ++r)
            for (auto c : rows[r].columns)
                os << r + 1 << ',' << c << '\n';
        return os.str();
    }

    friend bool operator==(const EventMatrix&, const EventMatrix&) = default;
};

inline void check_variable_count(int n) {
    if (n < 2 || n > kMaxVariables)
        throw SizeError("variable count must be in [2, " + std::to_string(kMaxVariables) +
                        "], got " + std::to_string(n));
}

/// Sparse construction from the outcome bits.
inline EventMatrix build_event_matrix(int n) {
    check_variable_count(n);
    EventMatrix k;
    k.n = n;
    k.m = static_cast<std::size_t>(n * (n + 1) / 2);
    k.N = std::size_t{1} << n;
    k.rows.reserve(k.m);
    auto bit = [n](std::uint32_t col, int i) { return (col >> (n - i)) & 1u; };

    for (int i = 1; i <= n; ++i) {
        SparseRow r{k.N, {}};
        r.columns.reserve(k.N / 2);
        for (std::uint32_t c = 0; c < k.N; ++c)
            if (bit(c, i) == 0)
                r.columns.push_back(c);
        k.rows.push_back(std::move(r));
    }
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            SparseRow r{k.N, {}};
            r.columns.reserve(k.N / 4);
            for (std::uint32_t c = 0; c < k.N; ++c)
                if (bit(c, i) == 1 && bit(c, j) == 1)
                    r.columns.push_back(c);
            k.rows.push_back(std::move(r));
        }
    return k;
}

/// Dense construction following the fill rules literally: row i alternates
/// 2^(n-i) ones and 2^(n-i) zeros starting with ones; a pair row holds 1
/// where both unary rows hold 0.
inline Matrix build_event_matrix_dense(int n) {
    check_variable_count(n);
    if (n > kMaxDenseVariables)
        throw SizeError("dense event matrix only for n <= " + std::to_string(kMaxDenseVariables));
    const std::size_t m = static_cast<std::size_t>(n * (n + 1) / 2);
    const std::size_t N = std::size_t{1} << n;
    Matrix k(m, N);
    for (int i = 1; i <= n; ++i) {
        const std::size_t run = std::size_t{1} << (n - i);
        for (std::size_t l = 0; l < N; ++l)
            k(static_cast<std::size_t>(i - 1), l) = ((l / run) % 2 == 0) ? 1.0 : 0.0;
    }
    for (std::size_t l = 0; l < N; ++l) {
        std::size_t row = static_cast<std::size_t>(n);
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j)
                k(row++, l) = (k(static_cast<std::size_t>(i), l) == 0.0 &&
                               k(static_cast<std::size_t>(j), l) == 0.0)
                                  ? 1.0
                                  : 0.0;
    }
    return k;
}

/// Event selector: not A_i, A_i, or A_i A_j (1-based indices).
struct Event {
    enum class Kind { NotA, A, Pair };
    Kind kind = Kind::NotA;
    int i = 1;
    int j = 0;

    static Event not_a(int i) { return {Kind::NotA, i, 0}; }
    static Event a(int i) { return {Kind::A, i, 0}; }
    static Event pair(int i, int j) { return {Kind::Pair, i, j}; }
};

/// Stored row for not A_i or A_i A_j; the A_i row is not stored and is
/// synthesized on demand as the complement of the not A_i row.
inline SparseRow row_for_event(const EventMatrix& k, const Event& e) {
    auto check = [&](int v) {
        if (v < 1 || v > k.n)
            throw DimensionError("event variable " + std::to_string(v) + " out of range");
    };
    switch (e.kind) {
    case Event::Kind::NotA:
        check(e.i);
        return k.rows[static_cast<std::size_t>(e.i - 1)];
    case Event::Kind::A:
        check(e.i);
        return complement(k.rows[static_cast<std::size_t>(e.i - 1)]);
    case Event::Kind::Pair: {
        check(e.i);
        check(e.j);
        int a = std::min(e.i, e.j);
        int b = std::max(e.i, e.j);
        if (a == b)
            throw DimensionError("pair event needs two distinct variables");
        return k.rows[static_cast<std::size_t>(pair_slot(k.n, a, b) - 1)];
    }
    }
    throw DimensionError("unknown event kind");
}

} // namespace qps
