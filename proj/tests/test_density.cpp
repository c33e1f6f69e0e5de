#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qps/density.hpp"
#include "qps/goldens.hpp"

using namespace qps;

namespace {

std::vector<oracle::Rational> exact_lambda(const MarginalSet& s) {
    const auto lam = to_lambda(s);
    std::vector<oracle::Rational> out;
    for (int i = 1; i <= s.n; ++i)
        out.push_back(oracle::rational_from_literal(s.pbar.at(i).text));
    for (int k = s.n + 1; k <= static_cast<int>(lam.size()); ++k)
        out.push_back(oracle::rational_from_literal(s.pjoint.at(slot_pair(s.n, k)).text));
    return out;
}

DensityResult density_of(const MarginalSet& s, const DensityOptions& opt = {}) {
    return build_density(build_event_matrix(s.n), to_lambda(s), opt);
}

// Instance with variable i renamed to perm[i-1].
MarginalSet permuted(const MarginalSet& s, const std::vector<int>& perm) {
    MarginalSet out;
    out.n = s.n;
    for (int i = 1; i <= s.n; ++i) {
        out.pbar[perm[static_cast<std::size_t>(i - 1)]] = s.pbar.at(i);
        for (int j = i + 1; j <= s.n; ++j) {
            int a = perm[static_cast<std::size_t>(i - 1)];
            int b = perm[static_cast<std::size_t>(j - 1)];
            out.pjoint[{std::min(a, b), std::max(a, b)}] = s.pjoint.at({i, j});
        }
    }
    return out;
}

std::uint32_t permute_outcome(std::uint32_t c, int n, const std::vector<int>& perm) {
    std::uint32_t out = 0;
    for (int i = 1; i <= n; ++i)
        if ((c >> (n - i)) & 1u)
            out |= 1u << (n - perm[static_cast<std::size_t>(i - 1)]);
    return out;
}

} // namespace

TEST(Density, ContextualTripleMatchesExactOracle) {
    const auto s = goldens::contextual_triple();
    const auto ref = oracle::exact_density(3, exact_lambda(s));
    const auto r = density_of(s);
    EXPECT_NEAR(r.trace_R, oracle::to_double(ref.trace_R), 1e-12);
    for (std::size_t b = 0; b < 8; ++b) {
        EXPECT_NEAR(r.joint[b], oracle::to_double(ref.joint[b]), 1e-12) << "outcome " << b;
        EXPECT_NEAR(r.diag_R[b], oracle::to_double(ref.diag_R[b]), 1e-12) << "outcome " << b;
    }
    // tr(R) is exactly 77/31 for this instance
    EXPECT_EQ(ref.trace_R, oracle::Rational(77, 31));
}

TEST(Density, ReferenceDiagonalsAgreeWithOracle) {
    const std::pair<MarginalSet, std::array<double, 8>> cases[] = {
        {goldens::contextual_triple(), goldens::kReferenceDiagonalContextual},
        {goldens::tight_triple(), goldens::kReferenceDiagonalTight},
    };
    for (const auto& [set, expected] : cases) {
        const auto ref = oracle::exact_density(3, exact_lambda(set));
        const auto r = density_of(set);
        for (std::size_t b = 0; b < 8; ++b) {
            EXPECT_NEAR(oracle::to_double(ref.joint[b]), expected[b], goldens::kReferenceDiagonalTolerance);
            EXPECT_NEAR(r.joint[b], expected[b], 5e-4) << "outcome " << b;
        }
    }
}

TEST(Density, TightTripleRestoresItsMarginals) {
    const auto r = density_of(goldens::tight_triple());
    const std::vector<double> want{0.5, 0.5, 0.5, 0.05, 0.45, 0.1};
    for (std::size_t i = 0; i < want.size(); ++i)
        EXPECT_NEAR(r.restored[i], want[i], 1e-12);
    EXPECT_LE(r.residual, 1e-9);
    // rho restores the marginals scaled by 1/tr(R)
    for (std::size_t i = 0; i < want.size(); ++i)
        EXPECT_NEAR(r.restored_rho[i], want[i] / r.trace_R, 1e-12);
}

TEST(Density, TwoVariableProductInstance) {
    const auto s = goldens::uniform_pairs(2);
    const auto ref = oracle::exact_density(2, exact_lambda(s));
    const auto r = density_of(s);

    const std::vector<double> lam{0.5, 0.5, 0.25};
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(r.restored[i], lam[i], 1e-10);

    // The minimum-norm joint is (4, 10, 10, 9) / 33, not the product 1/4.
    const std::vector<oracle::Rational> want{{4, 33}, {10, 33}, {10, 33}, {9, 33}};
    for (std::size_t b = 0; b < 4; ++b) {
        EXPECT_EQ(ref.joint[b], want[b]);
        EXPECT_NEAR(r.joint[b], oracle::to_double(want[b]), 1e-12);
    }
}

TEST(Density, ExactOracleRestoresLambdaExactly) {
    for (const auto& s : {goldens::contextual_triple(), goldens::tight_triple(), goldens::uniform_pairs(4)}) {
        const auto lam = exact_lambda(s);
        EXPECT_EQ(oracle::exact_density(s.n, lam).restored, lam);
    }
}

TEST(Density, GleasonProbabilityOfFullAndNullSpace) {
    const auto r = density_of(goldens::tight_triple());
    EXPECT_NEAR(gleason_probability(r, SparseRow::from_string("11111111")), 1.0, 1e-12);
    EXPECT_EQ(gleason_probability(r, SparseRow::from_string("00000000")), 0.0);
    const double a = gleason_probability(r, SparseRow::from_string("11000000"));
    const double b = gleason_probability(r, SparseRow::from_string("00110000"));
    EXPECT_NEAR(gleason_probability(r, SparseRow::from_string("11110000")), a + b, 1e-15);
    EXPECT_THROW(gleason_probability(r, SparseRow::from_string("1111")), DimensionError);
}

TEST(Density, QuadraticFormOnFirstUnaryRow) {
    const auto k = build_event_matrix(3);
    const auto r = density_of(goldens::tight_triple());
    const auto& row = row_for_event(k, Event::not_a(1));
    EXPECT_NEAR(quadratic_form(r, row, FormScale::R), 0.50, 1e-12);
    EXPECT_NEAR(quadratic_form(r, row, FormScale::Rho), 0.50 / r.trace_R, 1e-12);

    const auto fast = diag_fast(k, to_lambda(goldens::tight_triple()));
    EXPECT_NEAR(quadratic_form(fast, row, FormScale::R), 0.50, 1e-12);
}

TEST(Density, FullRankEventMatrix) {
    for (int n = 2; n <= 7; ++n) {
        const auto r = density_of(goldens::uniform_pairs(n));
        EXPECT_TRUE(r.full_rank()) << "n=" << n;
        EXPECT_EQ(r.effective_rank, static_cast<std::size_t>(n * (n + 1) / 2));
    }
}

TEST(Density, RandomInstancesArePsdNormalizedAndRestoring) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 3 + trial % 4;
        const auto r = density_of(oracle::random_marginals(n, rng));
        ASSERT_LE(r.residual, 1e-9) << "trial " << trial;
        ASSERT_NEAR(std::accumulate(r.joint.begin(), r.joint.end(), 0.0), 1.0, 1e-10);
        for (double p : r.joint)
            ASSERT_GE(p, 0.0);
        const auto e = eig_sym(*r.R, {.method = EigenMethod::TridiagonalQL});
        ASSERT_GE(e.sigma.back(), -1e-10);
    }
}

TEST(Density, IndependentOfSweepOrderAndSolver) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = oracle::random_marginals(3 + trial % 3, rng);
        const auto a = density_of(s, {.eigen = {.method = EigenMethod::Jacobi, .order = SweepOrder::RowCyclic}});
        const auto b = density_of(s, {.eigen = {.method = EigenMethod::Jacobi, .order = SweepOrder::ReverseCyclic}});
        const auto c = density_of(s, {.eigen = {.method = EigenMethod::TridiagonalQL}});
        ASSERT_LE(max_abs_diff(*a.R, *b.R), 1e-10);
        ASSERT_LE(max_abs_diff(*a.R, *c.R), 1e-10);
    }
}

TEST(Density, IndependentOfNullSpaceBasis) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int n = 3; n <= 5; ++n) {
        const auto k = build_event_matrix(n);
        const auto lam = to_lambda(oracle::random_marginals(n, rng));
        auto eig = eig_sym(gram_matrix(k));
        const auto base = assemble_density(k, lam, eig);

        // Givens rotations mixing the null-space columns.
        for (std::size_t p = k.m; p + 1 < k.N; ++p) {
            const double t = angle(rng);
            const double c = std::cos(t), s = std::sin(t);
            for (std::size_t r = 0; r < k.N; ++r) {
                const double x = eig.U(r, p), y = eig.U(r, p + 1);
                eig.U(r, p) = c * x - s * y;
                eig.U(r, p + 1) = s * x + c * y;
            }
        }
        const auto rotated = assemble_density(k, lam, eig);
        EXPECT_LE(max_abs_diff(*base.R, *rotated.R), 1e-12) << "n=" << n;
    }
}

TEST(Density, PermutationEquivariance) {
    std::mt19937_64 rng(21);
    for (int n = 3; n <= 5; ++n) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 1);
        for (int trial = 0; trial < 10; ++trial) {
            std::shuffle(perm.begin(), perm.end(), rng);
            const auto s = oracle::random_marginals(n, rng);
            const auto a = density_of(s);
            const auto b = density_of(permuted(s, perm));
            for (std::uint32_t c = 0; c < a.N; ++c)
                ASSERT_NEAR(b.joint[permute_outcome(c, n, perm)], a.joint[c], 1e-10);
        }
    }
}

TEST(Density, PathsAgree) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 3;
        const auto k = build_event_matrix(n);
        const auto lam = to_lambda(oracle::random_marginals(n, rng));
        const auto a = build_density(k, lam);
        const auto b = diag_fast(k, lam);
        for (std::size_t i = 0; i < a.N; ++i)
            ASSERT_NEAR(a.joint[i], b.joint[i], 1e-9);
        ASSERT_NEAR(a.trace_R, b.trace_R, 1e-9);
        ASSERT_LE(b.residual, 1e-9);
        ASSERT_FALSE(b.R.has_value());
    }
}

TEST(Density, UniformPairsJointDependsOnlyOnWeight) {
    for (int n = 3; n <= 6; ++n) {
        const auto r = density_of(goldens::uniform_pairs(n));
        EXPECT_LE(r.residual, 1e-9);
        std::vector<double> by_weight(static_cast<std::size_t>(n + 1), -1.0);
        for (std::uint32_t c = 0; c < r.N; ++c) {
            auto& slot = by_weight[static_cast<std::size_t>(std::popcount(c))];
            if (slot < 0)
                slot = r.joint[c];
            ASSERT_NEAR(r.joint[c], slot, 1e-12) << "n=" << n << " c=" << c;
        }
        // The joint is symmetric but not uniform.
        EXPECT_GT(*std::max_element(r.joint.begin(), r.joint.end()) -
                      *std::min_element(r.joint.begin(), r.joint.end()),
                  0.01);
    }
}

TEST(Density, UniformPairsThreeVariablesExact) {
    const auto s = goldens::uniform_pairs(3);
    const auto ref = oracle::exact_density(3, exact_lambda(s));
    const auto r = density_of(s);
    for (std::size_t b = 0; b < 8; ++b)
        EXPECT_NEAR(r.joint[b], oracle::to_double(ref.joint[b]), 1e-12);
}

TEST(Density, Errors) {
    const auto k = build_event_matrix(3);
    EXPECT_THROW(build_density(k, LambdaVector{3, std::vector<double>(6, 0.0)}), DegenerateError);
    EXPECT_THROW(build_density(k, LambdaVector{2, {0.5, 0.5, 0.25}}), DimensionError);
    EXPECT_THROW(diag_fast(k, LambdaVector{3, std::vector<double>(6, 0.0)}), DegenerateError);
}

TEST(Density, RhoHasUnitTraceAndMatchesJoint) {
    const auto r = density_of(goldens::contextual_triple());
    ASSERT_TRUE(r.rho.has_value());
    EXPECT_NEAR(r.rho->trace(), 1.0, 1e-14);
    const auto d = r.rho->diag();
    for (std::size_t b = 0; b < 8; ++b)
        EXPECT_EQ(d[b], r.joint[b]);
}
