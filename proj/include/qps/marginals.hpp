#pragma once

// Marginal probabilities of n binary variables: the problem instance.
//
// Unary entries are stored as P(not A_i) and pair entries as P(A_i A_j),
// i < j, both 1-based. The canonical lambda layout puts the n unary entries
// first, then the pairs in lexicographic (i, j) order.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qps/error.hpp"

namespace qps {

inline constexpr int kMaxVariables = 14;

/// A probability value together with the literal it was read from
/// (empty when it did not come from text).
struct Probability {
    double value = 0.0;
    std::string text;

    Probability() = default;
    Probability(double v) : value(v) {} // NOLINT(google-explicit-constructor)
    Probability(double v, std::string t) : value(v), text(std::move(t)) {}

    /// True when the literal was a fraction such as "9/20".
    bool is_fraction() const { return text.find('/') != std::string::npos; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline std::int64_t parse_integer(std::string_view s, std::string_view whole) {
    s = trim(s);
    if (s.empty())
        throw InputError("malformed probability literal '" + std::string(whole) + "'");
    std::size_t pos = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        pos = 1;
    }
    if (pos == s.size())
        throw InputError("malformed probability literal '" + std::string(whole) + "'");
    std::int64_t v = 0;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (c < '0' || c > '9')
            throw InputError("malformed probability literal '" + std::string(whole) + "'");
        if (v > (INT64_MAX - (c - '0')) / 10)
            throw InputError("integer overflow in '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
    }
    return negative ? -v : v;
}

} // namespace detail

/// Parses "0.45", "1e-3" or an integer fraction "9/20". Fractions are
/// reduced in integer arithmetic, then divided once, so the result is the
/// correctly rounded double whenever both terms fit in 53 bits.
inline Probability parse_probability(std::string_view literal) {
    const auto s = detail::trim(literal);
    if (s.empty())
        throw InputError("empty probability literal");
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        std::int64_t num = detail::parse_integer(s.substr(0, slash), s);
        std::int64_t den = detail::parse_integer(s.substr(slash + 1), s);
        if (den == 0)
            throw InputError("zero denominator in '" + std::string(s) + "'");
        const std::int64_t g = std::gcd(num, den);
        if (g != 0) {
            num /= g;
            den /= g;
        }
        return {static_cast<double>(num) / static_cast<double>(den), std::string(s)};
    }
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size())
        throw InputError("malformed probability literal '" + buf + "'");
    return {v, buf};
}

using PairIndex = std::pair<int, int>;

/// Unary complement probabilities P(not A_i) and pair conjunctions
/// P(A_i A_j) for n binary variables. Entries may be missing until the set
/// has been validated.
struct MarginalSet {
    int n = 0;
    std::map<int, Probability> pbar;
    std::map<PairIndex, Probability> pjoint;

    /// Builds a complete set from plain values; `pairs` is in canonical
    /// (1,2), (1,3), ..., (n-1,n) order.
    static MarginalSet from_values(int n, const std::vector<double>& unary_bar,
                                   const std::vector<double>& pairs) {
        if (static_cast<int>(unary_bar.size()) != n ||
            static_cast<int>(pairs.size()) != n * (n - 1) / 2)
            throw DimensionError("from_values: wrong number of entries");
        MarginalSet set;
        set.n = n;
        std::size_t k = 0;
        for (int i = 1; i <= n; ++i) {
            set.pbar[i] = unary_bar[static_cast<std::size_t>(i - 1)];
            for (int j = i + 1; j <= n; ++j)
                set.pjoint[{i, j}] = pairs[k++];
        }
        return set;
    }

    double bar(int i) const { return pbar.at(i).value; }
    /// P(A_i) = 1 - P(not A_i).
    double unary(int i) const { return 1.0 - bar(i); }
    double joint(int i, int j) const {
        if (i > j)
            std::swap(i, j);
        return pjoint.at({i, j}).value;
    }

    std::size_t pair_count() const { return static_cast<std::size_t>(n) * (n - 1) / 2; }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

inline std::string unary_key(int i) { return "pbar[" + std::to_string(i) + "]"; }
inline std::string pair_key(int i, int j) {
    return "pjoint[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

/// Checks completeness, ranges and (in strict mode, as errors; otherwise
/// as warnings) the within-context bound P(A_i A_j) <= min(P(A_i), P(A_j)).
inline ValidationReport validate(const MarginalSet& set, bool strict = false) {
    constexpr double slack = 1e-12;
    ValidationReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.errors.push_back(std::move(msg));
    };
    if (set.n < 2) {
        fail("n must be at least 2, got " + std::to_string(set.n));
        return rep;
    }
    auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };

    for (const auto& [i, p] : set.pbar)
        if (i < 1 || i > set.n)
            fail("unexpected key " + unary_key(i));
    for (const auto& [ij, p] : set.pjoint)
        if (ij.first < 1 || ij.second > set.n || ij.first >= ij.second)
            fail("unexpected key " + pair_key(ij.first, ij.second));

    for (int i = 1; i <= set.n; ++i) {
        auto it = set.pbar.find(i);
        if (it == set.pbar.end())
            fail("missing " + unary_key(i));
        else if (!in_unit(it->second.value))
            fail(unary_key(i) + " outside [0,1]");
    }
    for (int i = 1; i <= set.n; ++i)
        for (int j = i + 1; j <= set.n; ++j) {
            auto it = set.pjoint.find({i, j});
            if (it == set.pjoint.end())
                fail("missing " + pair_key(i, j));
            else if (!in_unit(it->second.value))
                fail(pair_key(i, j) + " outside [0,1]");
        }
    if (!rep.ok)
        return rep;

    for (int i = 1; i <= set.n; ++i)
        for (int j = i + 1; j <= set.n; ++j) {
            const double pij = set.joint(i, j);
            const double bound = std::min(set.unary(i), set.unary(j));
            if (pij > bound + slack) {
                std::string msg = pair_key(i, j) + " exceeds min(P(A_" + std::to_string(i) +
                                  "), P(A_" + std::to_string(j) + ")) = " + std::to_string(bound);
                if (strict)
                    fail(std::move(msg));
                else
                    rep.warnings.push_back(std::move(msg));
            }
        }
    return rep;
}

/// Throws ValidationError carrying every violated constraint.
inline void require_valid(const MarginalSet& set, bool strict = false) {
    const auto rep = validate(set, strict);
    if (rep.ok)
        return;
    std::string msg = "invalid marginal set:";
    for (const auto& e : rep.errors)
        msg += " " + e + ";";
    msg.pop_back();
    throw ValidationError(msg);
}

/// 1-based slot of P(A_i A_j) in the lambda vector:
/// k = (n(n-1) - (n-i)(n-i-1)) / 2 + j.
constexpr int pair_slot(int n, int i, int j) {
    return (n * (n - 1) - (n - i) * (n - i - 1)) / 2 + j;
}

/// Inverse of pair_slot for k in [n+1, n(n+1)/2].
inline PairIndex slot_pair(int n, int k) {
    for (int i = 1; i < n; ++i) {
        const int first = pair_slot(n, i, i + 1);
        const int last = pair_slot(n, i, n);
        if (k >= first && k <= last)
            return {i, k - first + i + 1};
    }
    throw DimensionError("slot " + std::to_string(k) + " is not a pair slot for n=" +
                         std::to_string(n));
}

/// Marginals laid out in the canonical order: P(not A_1..n), then pairs.
struct LambdaVector {
    int n = 0;
    std::vector<double> entries;

    std::size_t size() const { return entries.size(); }
    double operator[](std::size_t k) const { return entries[k]; }
};

inline LambdaVector to_lambda(const MarginalSet& set) {
    require_valid(set);
    const int n = set.n;
    LambdaVector lam{n, std::vector<double>(static_cast<std::size_t>(n * (n + 1) / 2))};
    for (int i = 1; i <= n; ++i)
        lam.entries[static_cast<std::size_t>(i - 1)] = set.bar(i);
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
            lam.entries[static_cast<std::size_t>(pair_slot(n, i, j) - 1)] = set.joint(i, j);
    return lam;
}

inline MarginalSet from_lambda(const LambdaVector& lam) {
    const int n = lam.n;
    if (lam.entries.size() != static_cast<std::size_t>(n * (n + 1) / 2))
        throw DimensionError("lambda length does not match n(n+1)/2");
    MarginalSet set;
    set.n = n;
    for (int i = 1; i <= n; ++i)
        set.pbar[i] = lam.entries[static_cast<std::size_t>(i - 1)];
    for (int k = n + 1; k <= n * (n + 1) / 2; ++k)
        set.pjoint[slot_pair(n, k)] = lam.entries[static_cast<std::size_t>(k - 1)];
    return set;
}

/// Binary observations of one or two variables taken in one context.
struct ContextSample {
    std::vector<int> variables; // 1 entry (unary) or 2 (pair), 1-based
    std::vector<std::vector<std::uint8_t>> observations;

    std::size_t count() const { return observations.size(); }
    bool is_unary() const { return variables.size() == 1; }
};

/// Relative-frequency marginals. Unary entries come from unary contexts,
/// pair entries from pair contexts; repeated contexts are pooled by count.
/// The exact pooled ratio is kept as the probability literal.
inline MarginalSet estimate_from_contexts(const std::vector<ContextSample>& samples) {
    struct Tally {
        std::uint64_t hits = 0;
        std::uint64_t total = 0;
    };
    std::map<int, Tally> unary;
    std::map<PairIndex, Tally> pairs;
    int n = 0;

    for (const auto& s : samples) {
        if (s.variables.empty() || s.variables.size() > 2)
            throw ValidationError("context arity must be 1 or 2");
        for (int v : s.variables) {
            if (v < 1)
                throw ValidationError("context variable index must be >= 1");
            n = std::max(n, v);
        }
        if (s.variables.size() == 2 && s.variables[0] == s.variables[1])
            throw ValidationError("pair context repeats variable " +
                                  std::to_string(s.variables[0]));
        for (const auto& obs : s.observations) {
            if (obs.size() != s.variables.size())
                throw ValidationError("observation arity does not match its context");
            for (auto b : obs)
                if (b > 1)
                    throw ValidationError("observations must be binary");
        }
        if (s.count() == 0)
            continue;
        if (s.is_unary()) {
            auto& t = unary[s.variables[0]];
            for (const auto& obs : s.observations)
                t.hits += obs[0] == 0;
            t.total += s.count();
        } else {
            const int a = std::min(s.variables[0], s.variables[1]);
            const int b = std::max(s.variables[0], s.variables[1]);
            auto& t = pairs[{a, b}];
            for (const auto& obs : s.observations)
                t.hits += obs[0] == 1 && obs[1] == 1;
            t.total += s.count();
        }
    }

    std::vector<std::string> missing;
    for (int i = 1; i <= n; ++i)
        if (!unary.contains(i))
            missing.push_back("unary " + std::to_string(i));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (!pairs.contains({i, j}))
                missing.push_back("pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (n < 2)
        missing.insert(missing.begin(), "at least two variables");
    if (!missing.empty()) {
        std::string msg = "incomplete context coverage, missing:";
        for (const auto& m : missing)
            msg += " " + m + ",";
        msg.pop_back();
        throw ValidationError(msg);
    }

    auto ratio = [](const Tally& t) {
        const auto g = std::gcd(t.hits, t.total);
        const auto num = g ? t.hits / g : t.hits;
        const auto den = g ? t.total / g : t.total;
        return Probability(static_cast<double>(num) / static_cast<double>(den),
                           std::to_string(num) + "/" + std::to_string(den));
    };
    MarginalSet set;
    set.n = n;
    for (const auto& [i, t] : unary)
        set.pbar[i] = ratio(t);
    for (const auto& [ij, t] : pairs)
        set.pjoint[ij] = ratio(t);
    return set;
}

} // namespace qps
