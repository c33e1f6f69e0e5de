#pragma once

// End-to-end run: ingest marginals, analyse classical feasibility, build the
// density matrix, rank outcomes, and render everything as one JSON report
// with a fixed field order.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qps/classical.hpp"
#include "qps/density.hpp"
#include "qps/error.hpp"
#include "qps/event_matrix.hpp"
#include "qps/io.hpp"
#include "qps/marginals.hpp"
#include "qps/ranking.hpp"

namespace qps {

inline constexpr const char* kReportSchema = "qps-report/1";

enum class InputFormat { Auto, Json, Csv, Contexts };
enum class RunMode { Feasibility, Density, Ranking, All };

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitValidation = 2,
    kExitDegenerate = 3,
    kExitSelftestFailed = 4,
};

struct RunConfig {
    std::vector<std::string> inputs;
    InputFormat format = InputFormat::Auto;
    RunMode mode = RunMode::All;
    bool emit_rho = false;
    int conditioning = 1;
    double alpha = 0.05;
    int precision = 10;
    double rank_tolerance = -1.0;
    bool strict = false;
    std::size_t top_k = 0;
};

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::ordered_json report;
};

namespace detail {

using ojson = nlohmann::ordered_json;

class Formatter {
public:
    explicit Formatter(int precision) : precision_(precision) {}

    /// Fixed decimal places.
    ojson prob(double x) const { return reparse("%.*f", x); }
    /// Significant digits in scientific notation (residuals, tolerances).
    ojson sci(double x) const { return reparse("%.*e", x); }

    ojson probs(const std::vector<double>& v) const {
        ojson a = ojson::array();
        for (double x : v)
            a.push_back(prob(x));
        return a;
    }

    ojson score(double x) const {
        if (std::isinf(x))
            return x > 0 ? "+inf" : "-inf";
        return prob(x);
    }

private:
    ojson reparse(const char* fmt, double x) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, fmt, precision_, x);
        double v = std::strtod(buf, nullptr);
        if (v == 0.0)
            v = 0.0; // drop negative zero
        return v;
    }
    int precision_;
};

inline std::string outcome_label(int n, std::size_t b) {
    return OutcomeIndex{n, static_cast<std::uint32_t>(b)}.bits();
}

inline ojson ranking_json(const Ranking& r, int n, const Formatter& fmt) {
    ojson order = ojson::array();
    for (auto b : r.order)
        order.push_back(outcome_label(n, b));
    ojson groups = ojson::array();
    for (const auto& g : r.tie_groups) {
        ojson members = ojson::array();
        for (auto b : g)
            members.push_back(outcome_label(n, b));
        groups.push_back({{"score", fmt.score(r.scores[g.front()])}, {"outcomes", members}});
    }
    return {{"order", order}, {"tie_groups", groups}};
}

inline ojson comparison_json(const ComparisonReport& c, int n) {
    return {
        {"kendall_tau", {{"distance", c.kendall_tau_distance},
                         {"discordant_pairs", c.discordant_pairs},
                         {"half_tied_pairs", c.half_tied_pairs},
                         {"total_pairs", c.total_pairs}}},
        {"top_1_agree", c.top1_agree},
        {"top_k_overlap", {{"k", c.top_k}, {"overlap", c.top_k_overlap}}},
        {"focal_event_positions", {{"outcome", outcome_label(n, c.focal_outcome)},
                                   {"qps", c.focal_position_a},
                                   {"ci", c.focal_position_b},
                                   {"qps_tie_group_size", c.focal_group_size_a},
                                   {"ci_tie_group_size", c.focal_group_size_b}}},
        {"tie_groups", {{"qps", c.tie_groups_a},
                        {"ci", c.tie_groups_b},
                        {"qps_largest", c.largest_tie_group_a},
                        {"ci_largest", c.largest_tie_group_b}}},
    };
}

inline InputFormat infer_format(const RunConfig& cfg) {
    if (cfg.format != InputFormat::Auto)
        return cfg.format;
    if (cfg.inputs.size() != 1 || std::filesystem::is_directory(cfg.inputs.front()))
        return InputFormat::Contexts;
    const auto ext = std::filesystem::path(cfg.inputs.front()).extension().string();
    if (ext == ".json")
        return InputFormat::Json;
    if (ext == ".csv")
        return InputFormat::Csv;
    throw InputError("cannot infer input format from '" + cfg.inputs.front() + "'; use --format");
}

inline const char* format_name(InputFormat f) {
    switch (f) {
    case InputFormat::Json: return "json";
    case InputFormat::Csv: return "csv";
    case InputFormat::Contexts: return "contexts";
    case InputFormat::Auto: return "auto";
    }
    return "?";
}

inline const char* mode_name(RunMode m) {
    switch (m) {
    case RunMode::Feasibility: return "feasibility";
    case RunMode::Density: return "density";
    case RunMode::Ranking: return "ranking";
    case RunMode::All: return "all";
    }
    return "?";
}

inline ojson input_json(const MarginalSet& set, InputFormat f, const Formatter& fmt) {
    ojson pbar = ojson::object();
    ojson pjoint = ojson::object();
    ojson exact = ojson::object();
    for (const auto& [i, p] : set.pbar) {
        pbar[std::to_string(i)] = fmt.prob(p.value);
        if (p.is_fraction())
            exact[unary_key(i)] = p.text;
    }
    for (const auto& [ij, p] : set.pjoint) {
        pjoint[std::to_string(ij.first) + "," + std::to_string(ij.second)] = fmt.prob(p.value);
        if (p.is_fraction())
            exact[pair_key(ij.first, ij.second)] = p.text;
    }
    ojson out = {{"format", format_name(f)}, {"n", set.n}, {"pbar", pbar}, {"pjoint", pjoint}};
    if (!exact.empty())
        out["exact"] = exact;
    return out;
}

inline ojson classical_json(const MarginalSet& set, const Formatter& fmt) {
    const auto rep = test_all_triples(set);
    ojson triples = ojson::array();
    for (const auto& b : rep.triples)
        triples.push_back({{"triple", b.triple},
                           {"ell", fmt.prob(b.ell)},
                           {"upsilon", fmt.prob(b.upsilon)},
                           {"feasible", b.feasible}});
    ojson out = {{"verdict", to_string(rep.verdict)},
                 {"necessary_condition_only", set.n > 3},
                 {"infeasible_triples", rep.infeasible_count()},
                 {"triples", triples}};
    if (set.n == 3) {
        const auto iv = oracle_interval(restrict_to_triple(set, 1, 2, 3));
        out["oracle_interval"] = iv ? ojson::array({fmt.prob(iv->first), fmt.prob(iv->second)}) : ojson();
    }
    return out;
}

inline ojson density_json(const DensityResult& d, bool emit_rho, const Formatter& fmt) {
    ojson out = {
        {"route", d.R ? "eigendecomposition of K'K" : "thin SVD of K"},
        {"m", d.m},
        {"N", d.N},
        {"effective_rank", d.effective_rank},
        {"rank_tolerance", fmt.sci(d.tolerance_used)},
        {"trace_R", fmt.prob(d.trace_R)},
        {"joint", fmt.probs(d.joint)},
        {"diag_R", fmt.probs(d.diag_R)},
        {"restored", fmt.probs(d.restored)},
        {"restored_rho", fmt.probs(d.restored_rho)},
        {"residual", fmt.sci(d.residual)},
        {"residual_rho", fmt.sci(d.residual_rho)},
    };
    if (emit_rho) {
        ojson rows = ojson::array();
        for (std::size_t r = 0; r < d.N; ++r) {
            ojson row = ojson::array();
            for (double x : d.rho->row(r))
                row.push_back(fmt.prob(x));
            rows.push_back(std::move(row));
        }
        out["rho"] = std::move(rows);
    }
    return out;
}

inline ojson ranking_section(const MarginalSet& set, const DensityResult& d, const RunConfig& cfg,
                             const Formatter& fmt) {
    const int n = set.n;
    const auto qps_joint = make_joint(n, d.joint, Provenance::QPS);
    const auto ci = ci_joint(set, cfg.conditioning);
    const auto rq = rank_single(qps_joint);
    const auto rc = rank_single(ci.dist);
    const auto npl = rank_npl(qps_joint, ci.dist, cfg.alpha);

    ojson deviation = ojson::object();
    std::size_t k = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            deviation[std::to_string(i) + "," + std::to_string(j)] = fmt.prob(ci.pair_deviation[k++]);

    ojson region = ojson::array();
    for (auto b : npl.region)
        region.push_back(outcome_label(n, b));

    ojson out = {
        {"conditioning", cfg.conditioning},
        {"ci_joint", fmt.probs(ci.dist.p)},
        {"ci_clamped", ci.clamped},
        {"ci_pair_deviation", deviation},
        {"qps", ranking_json(rq, n, fmt)},
        {"ci", ranking_json(rc, n, fmt)},
        {"comparison", comparison_json(compare_rankings(rq, rc, cfg.top_k), n)},
        {"npl", {{"p1", "QPS"},
                 {"p0", "CI"},
                 {"alpha", cfg.alpha},
                 {"ranking", ranking_json(npl.ranking, n, fmt)},
                 {"region", region},
                 {"region_p0", fmt.prob(npl.region_p0)},
                 {"region_p1", fmt.prob(npl.region_p1)}}},
    };

    if (n == 3) {
        // Classical joints at both ends of the feasible interval, when any.
        const auto tm = restrict_to_triple(set, 1, 2, 3);
        if (const auto iv = oracle_interval(tm)) {
            ojson ends = ojson::object();
            for (const auto& [name, t] : {std::pair{"ell", iv->first}, std::pair{"upsilon", iv->second}}) {
                const auto cj = joint_from_t(tm, t);
                std::vector<double> p(cj.probabilities.begin(), cj.probabilities.end());
                for (double& x : p)
                    x = std::max(x, 0.0);
                const auto r = rank_scores(p);
                ends[name] = {{"t", fmt.prob(t)},
                              {"joint", fmt.probs(p)},
                              {"focal_position", r.position(7) + 1}};
            }
            out["classical_endpoints"] = std::move(ends);
        }
    }
    return out;
}

inline MarginalSet load_marginals(const RunConfig& cfg, InputFormat f) {
    if (cfg.inputs.empty())
        throw InputError("no input given");
    switch (f) {
    case InputFormat::Json:
        return io::parse_marginals_json(io::read_file(cfg.inputs.front()));
    case InputFormat::Csv:
        return io::parse_marginals_csv(io::read_file(cfg.inputs.front()));
    case InputFormat::Contexts:
        return estimate_from_contexts(io::load_contexts(cfg.inputs));
    case InputFormat::Auto:
        break;
    }
    throw InputError("unresolved input format");
}

} // namespace detail

/// Runs the configured analyses on an already-loaded marginal set.
inline RunOutcome run_on(const MarginalSet& set, const RunConfig& cfg, InputFormat format = InputFormat::Json) {
    using detail::ojson;
    const detail::Formatter fmt(cfg.precision);
    RunOutcome out;
    out.report["schema"] = kReportSchema;
    out.report["mode"] = detail::mode_name(cfg.mode);

    auto fail = [&](int code, const char* kind, const std::string& msg) {
        out.exit_code = code;
        out.report["error"] = {{"kind", kind}, {"message", msg}};
        return out;
    };

    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        return fail(kExitValidation, "config", "alpha must lie in [0,1]");
    if (cfg.precision < 1 || cfg.precision > 17)
        return fail(kExitValidation, "config", "precision must lie in [1,17]");

    const auto val = validate(set, cfg.strict);
    out.report["input"] = detail::input_json(set, format, fmt);
    out.report["validation"] = {{"strict", cfg.strict}, {"ok", val.ok}, {"errors", val.errors},
                                {"warnings", val.warnings}};
    if (!val.ok)
        return fail(kExitValidation, "validation", val.errors.front());
    if (set.n > kMaxVariables)
        return fail(kExitValidation, "size", "n must not exceed " + std::to_string(kMaxVariables));
    if (cfg.emit_rho && set.n > kMaxDenseVariables)
        return fail(kExitValidation, "config",
                    "--emit-rho requires n <= " + std::to_string(kMaxDenseVariables));

    const bool want_classical = cfg.mode == RunMode::Feasibility || cfg.mode == RunMode::All;
    const bool want_density = cfg.mode == RunMode::Density || cfg.mode == RunMode::All;
    const bool want_ranking = cfg.mode == RunMode::Ranking || cfg.mode == RunMode::All;

    try {
        if (want_classical)
            out.report["classical"] = detail::classical_json(set, fmt);
        if (want_density || want_ranking) {
            const auto k = build_event_matrix(set.n);
            DensityOptions opt;
            opt.rank_tolerance = cfg.rank_tolerance;
            const auto d = build_density(k, to_lambda(set), opt);
            if (want_density)
                out.report["density"] = detail::density_json(d, cfg.emit_rho, fmt);
            if (want_ranking)
                out.report["ranking"] = detail::ranking_section(set, d, cfg, fmt);
        }
    } catch (const DegenerateError& e) {
        return fail(kExitDegenerate, "degenerate", e.what());
    } catch (const ValidationError& e) {
        return fail(kExitValidation, "validation", e.what());
    }
    return out;
}

/// Loads the configured input and runs it. Never throws for input problems;
/// they become an "error" entry and a non-zero exit code.
inline RunOutcome run(const RunConfig& cfg) {
    InputFormat f = InputFormat::Auto;
    MarginalSet set;
    auto fail = [](int code, const char* kind, const std::string& msg) {
        RunOutcome o;
        o.exit_code = code;
        o.report["schema"] = kReportSchema;
        o.report["error"] = {{"kind", kind}, {"message", msg}};
        return o;
    };
    try {
        f = detail::infer_format(cfg);
        set = detail::load_marginals(cfg, f);
    } catch (const ValidationError& e) {
        return fail(kExitValidation, "validation", e.what());
    } catch (const Error& e) {
        return fail(kExitInput, "input", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(kExitInput, "input", e.what());
    }
    return run_on(set, cfg, f);
}

} // namespace qps
