#pragma once

// Embedded golden checks: reference event matrices, lambda ordering, the
// worked three-variable instances and the conditional-independence tie.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qps/classical.hpp"
#include "qps/density.hpp"
#include "qps/event_matrix.hpp"
#include "qps/goldens.hpp"
#include "qps/marginals.hpp"
#include "qps/ranking.hpp"

namespace qps {

namespace detail {
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}
} // namespace detail

struct SelftestItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestItem> items;

    bool all_passed() const {
        for (const auto& i : items)
            if (!i.passed)
                return false;
        return true;
    }

    const SelftestItem* find(const std::string& name) const {
        for (const auto& i : items)
            if (i.name == name)
                return &i;
        return nullptr;
    }
};

struct SelftestOptions {
    /// Event-matrix builder under test (replaceable for mutation checks).
    std::function<EventMatrix(int)> builder = build_event_matrix;
    /// Bound on max |K[i] R K[i]' - lambda_i| for the restoration items.
    double restore_tolerance = 1e-9;
};

inline SelftestReport selftest(const SelftestOptions& opt = {}) {
    SelftestReport rep;
    auto item = [&](std::string name, auto&& check) {
        SelftestItem it{std::move(name), false, {}};
        try {
            it.passed = check(it.detail);
        } catch (const std::exception& e) {
            it.passed = false;
            it.detail = std::string("exception: ") + e.what();
        }
        rep.items.push_back(std::move(it));
    };

    item("event matrix n=3", [&](std::string& d) {
        const auto got = opt.builder(3).ascii();
        d = got == goldens::kEventMatrix3 ? "bit-exact" : "differs from the reference matrix";
        return got == goldens::kEventMatrix3;
    });
    item("event matrix n=4", [&](std::string& d) {
        const auto got = opt.builder(4).ascii();
        d = got == goldens::kEventMatrix4 ? "bit-exact" : "differs from the reference matrix";
        return got == goldens::kEventMatrix4;
    });
    item("lambda order n=3", [&](std::string& d) {
        const auto lam = to_lambda(goldens::contextual_triple());
        const std::vector<double> want{0.5, 0.5, 0.5, 0.45, 0.45, 0.1};
        d = "(1/2, 1/2, 1/2, 9/20, 9/20, 1/10)";
        return lam.entries == want;
    });
    item("lambda order n=4", [&](std::string& d) {
        const std::vector<PairIndex> want{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
        for (int k = 5; k <= 10; ++k)
            if (slot_pair(4, k) != want[static_cast<std::size_t>(k - 5)])
                return false;
        d = "pairs in slots 5..10 are (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)";
        return true;
    });
    item("bounds on the uniform-pairs instance", [&](std::string& d) {
        const auto b = bounds3(restrict_to_triple(goldens::uniform_pairs(3), 1, 2, 3));
        d = "ell=" + detail::sci(b.ell) + " upsilon=" + detail::sci(b.upsilon);
        return b.ell == 0.0 && b.upsilon == 0.25;
    });
    item("bounds on the contextual instance", [&](std::string& d) {
        const auto b = bounds3(restrict_to_triple(goldens::contextual_triple(), 1, 2, 3));
        d = b.feasible ? "feasible" : "infeasible";
        return !b.feasible;
    });

    auto restoration = [&](const MarginalSet& set, std::string& d) {
        const auto r = build_density(opt.builder(set.n), to_lambda(set));
        d = "residual " + detail::sci(r.residual);
        return r.residual <= opt.restore_tolerance;
    };
    item("restoration, contextual instance", [&](std::string& d) {
        return restoration(goldens::contextual_triple(), d);
    });
    item("restoration, tight instance", [&](std::string& d) {
        return restoration(goldens::tight_triple(), d);
    });

    auto diagonal = [&](const MarginalSet& set, const std::array<double, 8>& expected, std::string& d) {
        const auto r = build_density(opt.builder(set.n), to_lambda(set));
        double worst = 0.0;
        for (std::size_t b = 0; b < 8; ++b)
            worst = std::max(worst, std::abs(r.joint[b] - expected[b]));
        d = "max deviation from reference diagonal " + detail::sci(worst);
        return worst <= goldens::kReferenceDiagonalTolerance;
    };
    item("diagonal, contextual instance", [&](std::string& d) {
        return diagonal(goldens::contextual_triple(), goldens::kReferenceDiagonalContextual, d);
    });
    item("diagonal, tight instance", [&](std::string& d) {
        return diagonal(goldens::tight_triple(), goldens::kReferenceDiagonalTight, d);
    });
    item("conditional-independence tie", [&](std::string& d) {
        const auto ci = ci_joint(goldens::uniform_pairs(3), 1);
        const auto r = rank_single(ci.dist);
        d = std::to_string(r.tie_groups.size()) + " tie group(s)";
        return r.tie_groups.size() == 1 && r.tie_groups.front().size() == 8;
    });
    return rep;
}

} // namespace qps
