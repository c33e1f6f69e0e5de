#pragma once

// Classical (set-based) representability of a marginal set.
//
// For three events a single probability space exists only if the triple
// probability t = P(A_1 A_2 A_3) can be chosen so that all eight atoms of
// the Boolean algebra are non-negative. The closed-form bounds are
//
//   ell     = max{0, p12 + p13 - p1, p12 + p23 - p2, p13 + p23 - p3}
//   upsilon = min{p12, p13, p23, 1 - (p1 + p2 + p3 - p12 - p13 - p23)}
//
// and t must satisfy ell <= t <= upsilon. For n > 3 the check is applied to
// every triple, which is necessary but not sufficient for a global space.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qps/error.hpp"
#include "qps/marginals.hpp"

namespace qps {

inline constexpr double kFeasibilitySlack = 1e-12;

struct PitowskyBounds {
    std::array<int, 3> triple{1, 2, 3};
    double ell = 0.0;
    double upsilon = 0.0;
    bool feasible = true;
};

/// Unary P(A_i) (not complements) and pair marginals of one triple.
struct TripleMarginals {
    double p1 = 0, p2 = 0, p3 = 0;
    double p12 = 0, p13 = 0, p23 = 0;
};

inline TripleMarginals restrict_to_triple(const MarginalSet& set, int i, int j, int k) {
    return {set.unary(i), set.unary(j), set.unary(k),
            set.joint(i, j), set.joint(i, k), set.joint(j, k)};
}

inline PitowskyBounds bounds3(double p1, double p2, double p3, double p12, double p13, double p23) {
    PitowskyBounds b;
    b.ell = std::max({0.0, p12 + p13 - p1, p12 + p23 - p2, p13 + p23 - p3});
    b.upsilon = std::min({p12, p13, p23, 1.0 - (p1 + p2 + p3 - p12 - p13 - p23)});
    b.feasible = b.ell <= b.upsilon + kFeasibilitySlack;
    return b;
}

inline PitowskyBounds bounds3(const TripleMarginals& t) {
    return bounds3(t.p1, t.p2, t.p3, t.p12, t.p13, t.p23);
}

enum class ClassicalVerdict { NoTriples, AllTriplesFeasible, Infeasible };

inline const char* to_string(ClassicalVerdict v) {
    switch (v) {
    case ClassicalVerdict::NoTriples: return "no triples to test";
    case ClassicalVerdict::AllTriplesFeasible: return "feasible (necessary-condition check)";
    case ClassicalVerdict::Infeasible: return "infeasible";
    }
    return "?";
}

struct FeasibilityReport {
    std::vector<PitowskyBounds> triples;
    ClassicalVerdict verdict = ClassicalVerdict::NoTriples;

    std::size_t infeasible_count() const {
        return static_cast<std::size_t>(std::count_if(triples.begin(), triples.end(),
                                                      [](const auto& b) { return !b.feasible; }));
    }
};

/// bounds3 on every triple i < j < k, in lexicographic order.
inline FeasibilityReport test_all_triples(const MarginalSet& set) {
    require_valid(set);
    FeasibilityReport rep;
    for (int i = 1; i <= set.n; ++i)
        for (int j = i + 1; j <= set.n; ++j)
            for (int k = j + 1; k <= set.n; ++k) {
                auto b = bounds3(restrict_to_triple(set, i, j, k));
                b.triple = {i, j, k};
                rep.triples.push_back(b);
            }
    if (rep.triples.empty())
        rep.verdict = ClassicalVerdict::NoTriples;
    else if (rep.infeasible_count() > 0)
        rep.verdict = ClassicalVerdict::Infeasible;
    else
        rep.verdict = ClassicalVerdict::AllTriplesFeasible;
    return rep;
}

/// Joint over {0,1}^3 (index = 4 b1 + 2 b2 + b3) fixed by the triple
/// marginals and the chosen t. Entries are not clamped.
struct ClassicalJoint {
    int n = 3;
    std::array<double, 8> probabilities{};
    double t = 0.0;
    bool valid = true; // every entry >= -kFeasibilitySlack
};

namespace detail {

/// Moebius inversion over the subsets of {1,2,3}: atom(b) is the signed sum
/// of mu(S) over the supersets S of the variables set in b. `mu` is indexed
/// by the 3-bit mask of S using the same bit order as outcomes.
inline std::array<double, 8> moebius3(const std::array<double, 8>& mu) {
    std::array<double, 8> atoms{};
    for (unsigned b = 0; b < 8; ++b) {
        double s = 0.0;
        for (unsigned sup = 0; sup < 8; ++sup) {
            if ((sup & b) != b)
                continue;
            const int extra = std::popcount(sup) - std::popcount(b);
            s += (extra % 2 ? -1.0 : 1.0) * mu[sup];
        }
        atoms[b] = s;
    }
    return atoms;
}

inline std::array<double, 8> subset_measures(const TripleMarginals& m, double empty, double t) {
    // mask bits: 4 = variable 1, 2 = variable 2, 1 = variable 3
    return {empty, m.p3, m.p2, m.p23, m.p1, m.p13, m.p12, t};
}

} // namespace detail

inline ClassicalJoint joint_from_t(const TripleMarginals& m, double t) {
    ClassicalJoint j;
    j.t = t;
    j.probabilities = detail::moebius3(detail::subset_measures(m, 1.0, t));
    j.valid = std::all_of(j.probabilities.begin(), j.probabilities.end(),
                          [](double p) { return p >= -kFeasibilitySlack; });
    return j;
}

/// Feasible interval of t obtained by intersecting the eight half-lines
/// atom_b(t) >= 0; empty when the half-lines do not meet.
inline std::optional<std::pair<double, double>> oracle_interval(const TripleMarginals& m) {
    const auto intercept = detail::moebius3(detail::subset_measures(m, 1.0, 0.0));
    const auto slope = detail::moebius3(detail::subset_measures(TripleMarginals{}, 0.0, 1.0));
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < 8; ++b) {
        if (slope[b] > 0)
            lo = std::max(lo, -intercept[b] / slope[b]);
        else if (slope[b] < 0)
            hi = std::min(hi, intercept[b] / -slope[b]);
        else if (intercept[b] < -kFeasibilitySlack)
            return std::nullopt;
    }
    if (lo > hi + kFeasibilitySlack)
        return std::nullopt;
    return std::make_pair(lo, hi);
}

/// Unary complements and pair conjunctions induced by a joint over 2^n
/// outcomes (big-endian bit order, variable 1 most significant).
inline MarginalSet induced_marginals(int n, std::span<const double> p) {
    const std::size_t N = std::size_t{1} << n;
    if (p.size() != N)
        throw DimensionError("joint size does not match 2^n");
    std::vector<double> bar(static_cast<std::size_t>(n), 0.0);
    std::vector<double> pairs(static_cast<std::size_t>(n * (n - 1) / 2), 0.0);
    for (std::size_t b = 0; b < N; ++b) {
        std::size_t k = 0;
        for (int i = 1; i <= n; ++i) {
            const bool bi = (b >> (n - i)) & 1u;
            if (!bi)
                bar[static_cast<std::size_t>(i - 1)] += p[b];
            for (int j = i + 1; j <= n; ++j, ++k)
                if (bi && ((b >> (n - j)) & 1u))
                    pairs[k] += p[b];
        }
    }
    return MarginalSet::from_values(n, bar, pairs);
}

} // namespace qps
