// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qps/qps.hpp"

using namespace qps;

namespace {

constexpr double kK1BudgetMs = 1.0;
constexpr double kBoundsBudgetS = 1.0;
constexpr double kOracleAgreement = 1e-12;
constexpr int kRandomTriples = 1000;
constexpr int kRestorationPerN = 1000;
constexpr double kRestorationTol = 1e-9;
constexpr double kRestorationBudgetS = 30.0;
constexpr double kMinEigFloor = -1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kReferenceTol = 0.02;
constexpr int kPathCases = 200;
constexpr double kPathTol = 1e-9;
constexpr double kScale12BudgetS = 10.0;
constexpr double kScale14BudgetS = 120.0;
constexpr double kScale14Residual = 1e-7;
constexpr int kPropertyCasesMin = 10000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s  %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<oracle::Rational> exact_lambda(const MarginalSet& s) {
    require_valid(s);
    std::vector<oracle::Rational> out;
    for (int i = 1; i <= s.n; ++i)
        out.push_back(oracle::rational_from_literal(s.pbar.at(i).text));
    const int m = s.n * (s.n + 1) / 2;
    for (int k = s.n + 1; k <= m; ++k)
        out.push_back(oracle::rational_from_literal(s.pjoint.at(slot_pair(s.n, k)).text));
    return out;
}

// Corpus shared by criteria 3 and 4: half realizable, half arbitrary
// entries in [0,1].
std::vector<MarginalSet> corpus_for(int n, std::mt19937_64& rng) {
    std::vector<MarginalSet> out;
    out.reserve(kRestorationPerN);
    for (int t = 0; t < kRestorationPerN; ++t)
        out.push_back(t % 2 ? oracle::random_marginals(n, rng)
                            : induced_marginals(n, oracle::random_joint(n, rng)));
    return out;
}

MarginalSet permuted(const MarginalSet& s, const std::vector<int>& perm) {
    MarginalSet out;
    out.n = s.n;
    for (int i = 1; i <= s.n; ++i) {
        out.pbar[perm[static_cast<std::size_t>(i - 1)]] = s.pbar.at(i);
        for (int j = i + 1; j <= s.n; ++j) {
            const int a = perm[static_cast<std::size_t>(i - 1)];
            const int b = perm[static_cast<std::size_t>(j - 1)];
            out.pjoint[{std::min(a, b), std::max(a, b)}] = s.pjoint.at({i, j});
        }
    }
    return out;
}

} // namespace

int main() {
    report(1, "event matrix goldens (n=3, n=4), < 1 ms", [] {
        const auto t0 = Clock::now();
        const auto k3 = build_event_matrix(3).ascii();
        const auto k4 = build_event_matrix(4).ascii();
        const double ms = seconds_since(t0) * 1e3;
        const bool ok = k3 == goldens::kEventMatrix3 && k4 == goldens::kEventMatrix4;
        return Outcome{ok && ms < kK1BudgetMs,
                       std::string(ok ? "bit-exact" : "MISMATCH") + fmt(", %.3f ms", ms)};
    });

    report(2, "triple bounds and interval oracle, < 1 s", [] {
        const auto t0 = Clock::now();
        const auto u = bounds3(restrict_to_triple(goldens::uniform_pairs(3), 1, 2, 3));
        const auto c = bounds3(restrict_to_triple(goldens::contextual_triple(), 1, 2, 3));
        const bool examples = u.ell == 0.0 && u.upsilon == 0.25 && u.feasible && !c.feasible;

        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        int mismatched = 0, infeasible = 0;
        for (int t = 0; t < kRandomTriples; ++t) {
            TripleMarginals m;
            if (t % 2) {
                const auto s = induced_marginals(3, oracle::random_joint(3, rng));
                m = restrict_to_triple(s, 1, 2, 3);
            } else {
                m = {unit(rng), unit(rng), unit(rng), 0, 0, 0};
                m.p12 = unit(rng) * std::min(m.p1, m.p2);
                m.p13 = unit(rng) * std::min(m.p1, m.p3);
                m.p23 = unit(rng) * std::min(m.p2, m.p3);
            }
            const auto b = bounds3(m);
            const auto o = oracle_interval(m);
            if (b.feasible != o.has_value()) {
                ++mismatched;
                continue;
            }
            if (!o) {
                ++infeasible;
                continue;
            }
            worst = std::max({worst, std::abs(o->first - b.ell), std::abs(o->second - b.upsilon)});
        }
        const double s = seconds_since(t0);
        const bool ok = examples && mismatched == 0 && worst <= kOracleAgreement && s < kBoundsBudgetS;
        return Outcome{ok, std::string(examples ? "(0, 1/4) exact, contextual infeasible" : "EXAMPLES FAIL") +
                               "; " + std::to_string(kRandomTriples) + " triples, " +
                               std::to_string(infeasible) + " infeasible, " + std::to_string(mismatched) +
                               " verdict mismatches, max endpoint gap " + fmt("%.2e", worst) +
                               fmt(", %.3f s", s)};
    });

    std::vector<DensityResult> corpus_results;
    int corpus_infeasible = 0;
    report(3, "restoration on 1000 random sets per n in {3,4,5,6}, < 30 s", [&] {
        std::mt19937_64 rng(3);
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int n = 3; n <= 6; ++n) {
            const auto k = build_event_matrix(n);
            for (const auto& s : corpus_for(n, rng)) {
                if (test_all_triples(s).verdict == ClassicalVerdict::Infeasible)
                    ++corpus_infeasible;
                auto r = build_density(k, to_lambda(s));
                worst = std::max(worst, r.residual);
                corpus_results.push_back(std::move(r));
            }
        }
        const double s = seconds_since(t0);
        return Outcome{worst <= kRestorationTol && s < kRestorationBudgetS,
                       fmt("max residual %.2e", worst) + " over " + std::to_string(corpus_results.size()) +
                           " sets (" + std::to_string(corpus_infeasible) + " classically infeasible)" +
                           fmt(", %.2f s", s)};
    });

    report(4, "PSD and normalization on the same corpus", [&] {
        double min_eig = 0.0, min_diag = 0.0, worst_sum = 0.0;
        for (const auto& r : corpus_results) {
            const auto e = eig_sym(*r.R, {.method = EigenMethod::TridiagonalQL});
            min_eig = std::min(min_eig, e.sigma.back());
            min_diag = std::min(min_diag, *std::min_element(r.diag_R.begin(), r.diag_R.end()));
            const double sum = std::accumulate(r.joint.begin(), r.joint.end(), 0.0);
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
        const bool ok = !corpus_results.empty() && min_eig >= kMinEigFloor && min_diag >= 0.0 &&
                        worst_sum <= kTraceTol;
        return Outcome{ok, fmt("min eig(R) %.2e", min_eig) + fmt(", min diag %.2e", min_diag) +
                               fmt(", max |sum - 1| %.2e", worst_sum)};
    });

    report(5, "reference diagonals within 0.02, rational oracle at n=3", [] {
        const std::pair<MarginalSet, std::array<double, 8>> cases[] = {
            {goldens::contextual_triple(), goldens::kReferenceDiagonalContextual},
            {goldens::tight_triple(), goldens::kReferenceDiagonalTight},
        };
        double worst_reference = 0.0, worst_oracle = 0.0;
        for (const auto& [set, expected] : cases) {
            const auto r = build_density(build_event_matrix(3), to_lambda(set));
            const auto ref = oracle::exact_density(3, exact_lambda(set));
            for (std::size_t b = 0; b < 8; ++b) {
                worst_reference = std::max(worst_reference, std::abs(r.joint[b] - expected[b]));
                worst_oracle = std::max(worst_oracle, std::abs(r.joint[b] - oracle::to_double(ref.joint[b])));
            }
        }
        return Outcome{worst_reference <= kReferenceTol && worst_oracle <= 1e-12,
                       fmt("max deviation from reference %.2e", worst_reference) +
                           fmt(", from exact oracle %.2e", worst_oracle)};
    });

    report(6, "build_density vs diag_fast on 200 instances, n in {3,4,5}", [] {
        std::mt19937_64 rng(6);
        double worst = 0.0;
        for (int t = 0; t < kPathCases; ++t) {
            const int n = 3 + t % 3;
            const auto k = build_event_matrix(n);
            const auto lam = to_lambda(oracle::random_marginals(n, rng));
            const auto a = build_density(k, lam);
            const auto b = diag_fast(k, lam);
            for (std::size_t i = 0; i < a.N; ++i)
                worst = std::max(worst, std::abs(a.joint[i] - b.joint[i]));
            for (std::size_t i = 0; i < a.m; ++i)
                worst = std::max(worst, std::abs(a.restored[i] - b.restored[i]));
        }
        return Outcome{worst <= kPathTol, fmt("max difference %.2e", worst)};
    });

    report(7, "diag_fast scale: n=12 < 10 s, n=14 < 120 s with residual <= 1e-7", [] {
        auto timed = [](int n) {
            const auto t0 = Clock::now();
            const auto r = diag_fast(build_event_matrix(n), to_lambda(goldens::uniform_pairs(n)));
            return std::make_pair(seconds_since(t0), r.residual);
        };
        const auto [s12, r12] = timed(12);
        const auto [s14, r14] = timed(14);
        const bool ok = s12 < kScale12BudgetS && s14 < kScale14BudgetS && r14 <= kScale14Residual;
        return Outcome{ok, fmt("n=12 %.2f s", s12) + fmt(" (residual %.2e)", r12) + fmt(", n=14 %.2f s", s14) +
                               fmt(" (residual %.2e)", r14)};
    });

    report(8, "conditional-independence tie on the uniform-pairs instance", [] {
        const auto ci = ci_joint(goldens::uniform_pairs(3), 1);
        double worst = 0.0;
        for (double p : ci.dist.p)
            worst = std::max(worst, std::abs(p - 0.125));
        const auto r = rank_single(ci.dist);
        const bool one_group = r.tie_groups.size() == 1 && r.tie_groups[0].size() == 8;
        return Outcome{worst <= 1e-15 && one_group,
                       fmt("max |p - 1/8| %.1e", worst) + ", " + std::to_string(r.tie_groups.size()) +
                           " tie group(s) of " + std::to_string(r.tie_groups[0].size())};
    });

    report(9, "randomized property harness, >= 10^4 cases", [] {
        std::mt19937_64 rng(9);
        int cases = 0, failed = 0;

        // permutation equivariance, n <= 5
        for (int t = 0; t < 1200; ++t, ++cases) {
            const int n = 2 + t % 4;
            std::vector<int> perm(static_cast<std::size_t>(n));
            std::iota(perm.begin(), perm.end(), 1);
            std::shuffle(perm.begin(), perm.end(), rng);
            const auto s = oracle::random_marginals(n, rng);
            const auto a = build_density(build_event_matrix(n), to_lambda(s));
            const auto b = build_density(build_event_matrix(n), to_lambda(permuted(s, perm)));
            for (std::uint32_t c = 0; c < a.N; ++c) {
                std::uint32_t pc = 0;
                for (int i = 1; i <= n; ++i)
                    if ((c >> (n - i)) & 1u)
                        pc |= 1u << (n - perm[static_cast<std::size_t>(i - 1)]);
                if (std::abs(a.joint[c] - b.joint[pc]) > 1e-10) {
                    ++failed;
                    break;
                }
            }
        }

        // argsort invariance under a strictly increasing map
        std::uniform_int_distribution<int> level(0, 6);
        for (int t = 0; t < 3000; ++t, ++cases) {
            const std::size_t N = 2 + rng() % 63;
            std::vector<double> s(N), mapped(N);
            for (std::size_t i = 0; i < N; ++i) {
                s[i] = level(rng) * 0.125;
                mapped[i] = 5.0 * s[i] * s[i] * s[i] + s[i] - 1.0;
            }
            const auto a = rank_scores(s);
            const auto b = rank_scores(mapped);
            if (a.order != b.order || a.tie_groups != b.tie_groups)
                ++failed;
        }

        // NPL region nesting
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < 3000; ++t, ++cases) {
            const int n = 1 + t % 5;
            const auto p1 = make_joint(n, oracle::random_joint(n, rng), Provenance::External);
            auto q = oracle::random_joint(n, rng);
            if (t % 3 == 0)
                q[rng() % q.size()] = 0.0;
            const double sum = std::accumulate(q.begin(), q.end(), 0.0);
            for (auto& x : q)
                x /= sum;
            const auto p0 = make_joint(n, q, Provenance::External);
            double a = unit(rng), b = unit(rng);
            if (a > b)
                std::swap(a, b);
            const auto ra = rank_npl(p1, p0, a).region;
            const auto rb = rank_npl(p1, p0, b).region;
            if (ra.size() > rb.size() || !std::equal(ra.begin(), ra.end(), rb.begin()))
                ++failed;
        }

        // to_lambda / from_lambda round trip
        for (int t = 0; t < 3000; ++t, ++cases) {
            const int n = 2 + t % 13;
            const auto s = oracle::random_marginals(n, rng);
            const auto back = to_lambda(from_lambda(to_lambda(s)));
            if (back.entries != to_lambda(s).entries)
                ++failed;
        }

        return Outcome{failed == 0 && cases >= kPropertyCasesMin,
                       std::to_string(cases) + " cases, " + std::to_string(failed) + " failures"};
    });

    std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed" : "acceptance: FAILED");
    return failures == 0 ? 0 : 1;
}
