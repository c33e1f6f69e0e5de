#pragma once

// Outcome rankings over {0,1}^n and their comparison.
//
// A joint distribution ranks outcomes by probability. Two distributions
// (positive class p1, negative class p0) rank outcomes by likelihood ratio;
// the Neyman-Pearson acceptance region at level alpha is the longest prefix
// of that ranking whose p0 mass stays within alpha.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qps/classical.hpp"
#include "qps/error.hpp"
#include "qps/marginals.hpp"

namespace qps {

inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kDistributionTolerance = 1e-10;

enum class Provenance { QPS, CI, Classical, External };

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::QPS: return "QPS";
    case Provenance::CI: return "CI";
    case Provenance::Classical: return "classical";
    case Provenance::External: return "external";
    }
    return "?";
}

struct JointDistribution {
    int n = 0;
    std::vector<double> p;
    Provenance provenance = Provenance::External;

    std::size_t size() const { return p.size(); }
};

/// Checks size, non-negativity and unit sum within kDistributionTolerance.
inline JointDistribution make_joint(int n, std::vector<double> p, Provenance prov) {
    if (n < 1 || p.size() != (std::size_t{1} << n))
        throw DimensionError("joint distribution needs 2^n entries");
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < -kDistributionTolerance)
            throw ValidationError("joint distribution has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance)
        throw ValidationError("joint distribution sums to " + std::to_string(sum));
    return {n, std::move(p), prov};
}

struct CiJoint {
    JointDistribution dist;
    int conditioning = 1;
    int clamped = 0; // conditionals pushed back into [0,1]
    /// P(A_i A_j) under the CI joint minus the input, canonical pair order.
    std::vector<double> pair_deviation;
};

/// Joint under conditional independence given one variable c:
/// P(b) = P(A_c = b_c) * prod_{j != c} P(A_j = b_j | A_c = b_c).
inline CiJoint ci_joint(const MarginalSet& set, int conditioning = 1) {
    require_valid(set);
    const int n = set.n;
    if (conditioning < 1 || conditioning > n)
        throw ValidationError("conditioning variable " + std::to_string(conditioning) + " out of range");
    const double pc = set.unary(conditioning);
    if (!(pc > 0.0 && pc < 1.0))
        throw DegenerateError("conditioning variable " + std::to_string(conditioning) +
                              " is deterministic: P(A_c) = " + std::to_string(pc));

    CiJoint out;
    out.conditioning = conditioning;
    // given[v][j]: P(A_j | A_c = v)
    std::vector<double> given[2];
    for (auto& g : given)
        g.assign(static_cast<std::size_t>(n + 1), 0.0);
    auto clamp = [&](double x) {
        if (x < 0.0 || x > 1.0) {
            ++out.clamped;
            return std::clamp(x, 0.0, 1.0);
        }
        return x;
    };
    for (int j = 1; j <= n; ++j) {
        if (j == conditioning)
            continue;
        const double pjc = set.joint(j, conditioning);
        given[1][static_cast<std::size_t>(j)] = clamp(pjc / pc);
        given[0][static_cast<std::size_t>(j)] = clamp((set.unary(j) - pjc) / (1.0 - pc));
    }

    const std::size_t N = std::size_t{1} << n;
    std::vector<double> p(N);
    double sum = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
        const int bc = static_cast<int>((b >> (n - conditioning)) & 1u);
        double v = bc ? pc : 1.0 - pc;
        for (int j = 1; j <= n; ++j) {
            if (j == conditioning)
                continue;
            const double q = given[bc][static_cast<std::size_t>(j)];
            v *= ((b >> (n - j)) & 1u) ? q : 1.0 - q;
        }
        p[b] = v;
        sum += v;
    }
    for (double& v : p)
        v /= sum;

    const auto induced = induced_marginals(n, p);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            out.pair_deviation.push_back(induced.joint(i, j) - set.joint(i, j));
    out.dist = make_joint(n, std::move(p), Provenance::CI);
    return out;
}

struct Ranking {
    std::vector<std::size_t> order;                    // best first
    std::vector<double> scores;                        // indexed by outcome
    std::vector<std::vector<std::size_t>> tie_groups;  // in ranking order

    std::size_t size() const { return order.size(); }

    /// 0-based position of an outcome in `order`.
    std::size_t position(std::size_t outcome) const {
        return static_cast<std::size_t>(std::find(order.begin(), order.end(), outcome) - order.begin());
    }

    /// Index of the tie group containing an outcome.
    std::size_t group_of(std::size_t outcome) const {
        for (std::size_t g = 0; g < tie_groups.size(); ++g)
            if (std::find(tie_groups[g].begin(), tie_groups[g].end(), outcome) != tie_groups[g].end())
                return g;
        return tie_groups.size();
    }
};

namespace detail {

inline bool tied(double a, double b) {
    if (a == b)
        return true; // includes equal infinities
    return std::abs(a - b) <= kTieTolerance;
}

} // namespace detail

/// Orders outcomes by descending score. Scores within kTieTolerance of
/// their neighbour form one tie group, listed by ascending outcome index.
inline Ranking rank_scores(std::span<const double> scores) {
    Ranking r;
    r.scores.assign(scores.begin(), scores.end());
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k == 0 || !detail::tied(scores[idx[k - 1]], scores[idx[k]]))
            r.tie_groups.emplace_back();
        r.tie_groups.back().push_back(idx[k]);
    }
    for (auto& g : r.tie_groups) {
        std::sort(g.begin(), g.end());
        r.order.insert(r.order.end(), g.begin(), g.end());
    }
    return r;
}

inline Ranking rank_single(const JointDistribution& dist) { return rank_scores(dist.p); }

struct NplResult {
    Ranking ranking;
    std::vector<std::size_t> region; // acceptance region, in ranking order
    double region_p0 = 0.0;
    double region_p1 = 0.0;
};

/// Likelihood-ratio ranking of p1 against p0. A zero p0 with positive p1
/// scores +inf (first); 0/0 scores -inf (last).
inline NplResult rank_npl(const JointDistribution& p1, const JointDistribution& p0, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("alpha must lie in [0,1]");
    if (p1.n != p0.n || p1.size() != p0.size())
        throw DimensionError("rank_npl: distributions over different outcome spaces");
    std::vector<double> ratio(p1.size());
    for (std::size_t b = 0; b < ratio.size(); ++b) {
        if (p0.p[b] > 0.0)
            ratio[b] = p1.p[b] / p0.p[b];
        else
            ratio[b] = p1.p[b] > 0.0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
    }
    NplResult out;
    out.ranking = rank_scores(ratio);
    for (auto b : out.ranking.order) {
        if (out.region_p0 + p0.p[b] > alpha + kTieTolerance)
            break;
        out.region.push_back(b);
        out.region_p0 += p0.p[b];
        out.region_p1 += p1.p[b];
    }
    return out;
}

struct ComparisonReport {
    double kendall_tau_distance = 0.0; // discordant + 0.5 * tied in exactly one
    std::size_t discordant_pairs = 0;
    std::size_t half_tied_pairs = 0;
    std::size_t total_pairs = 0;
    bool top1_agree = false;
    std::size_t top_k = 0;
    std::size_t top_k_overlap = 0;
    std::size_t focal_outcome = 0;        // all variables true
    std::size_t focal_position_a = 0;     // 1-based
    std::size_t focal_position_b = 0;
    std::size_t focal_group_size_a = 0;
    std::size_t focal_group_size_b = 0;
    std::size_t tie_groups_a = 0;
    std::size_t tie_groups_b = 0;
    std::size_t largest_tie_group_a = 0;
    std::size_t largest_tie_group_b = 0;
};

/// Tie-aware comparison of two rankings of the same outcome space.
/// top_k = 0 selects max(1, N / 4).
inline ComparisonReport compare_rankings(const Ranking& a, const Ranking& b, std::size_t top_k = 0) {
    if (a.size() != b.size() || a.size() == 0)
        throw DimensionError("compare_rankings: rankings over different outcome spaces");
    const std::size_t N = a.size();
    auto group_index = [N](const Ranking& r) {
        std::vector<std::size_t> g(N);
        for (std::size_t k = 0; k < r.tie_groups.size(); ++k)
            for (auto x : r.tie_groups[k])
                g[x] = k;
        return g;
    };
    const auto ga = group_index(a);
    const auto gb = group_index(b);

    ComparisonReport rep;
    for (std::size_t x = 0; x < N; ++x)
        for (std::size_t y = x + 1; y < N; ++y) {
            const int sa = (ga[x] < ga[y]) - (ga[x] > ga[y]);
            const int sb = (gb[x] < gb[y]) - (gb[x] > gb[y]);
            if (sa * sb < 0)
                ++rep.discordant_pairs;
            else if ((sa == 0) != (sb == 0))
                ++rep.half_tied_pairs;
        }
    rep.total_pairs = N * (N - 1) / 2;
    rep.kendall_tau_distance = static_cast<double>(rep.discordant_pairs) + 0.5 * static_cast<double>(rep.half_tied_pairs);

    rep.top1_agree = a.order.front() == b.order.front();
    rep.top_k = top_k == 0 ? std::max<std::size_t>(1, N / 4) : std::min(top_k, N);
    std::vector<std::size_t> ta(a.order.begin(), a.order.begin() + static_cast<std::ptrdiff_t>(rep.top_k));
    std::vector<std::size_t> tb(b.order.begin(), b.order.begin() + static_cast<std::ptrdiff_t>(rep.top_k));
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    std::vector<std::size_t> common;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
    rep.top_k_overlap = common.size();

    rep.focal_outcome = N - 1;
    rep.focal_position_a = a.position(N - 1) + 1;
    rep.focal_position_b = b.position(N - 1) + 1;
    rep.focal_group_size_a = a.tie_groups[ga[N - 1]].size();
    rep.focal_group_size_b = b.tie_groups[gb[N - 1]].size();
    rep.tie_groups_a = a.tie_groups.size();
    rep.tie_groups_b = b.tie_groups.size();
    for (const auto& g : a.tie_groups)
        rep.largest_tie_group_a = std::max(rep.largest_tie_group_a, g.size());
    for (const auto& g : b.tie_groups)
        rep.largest_tie_group_b = std::max(rep.largest_tie_group_b, g.size());
    return rep;
}

} // namespace qps
