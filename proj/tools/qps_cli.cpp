// qps: quantum probability space from multi-context marginals.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "qps/event_matrix.hpp"
#include "qps/report.hpp"
#include "qps/selftest.hpp"

namespace {

int run_selftest(double restore_tolerance) {
    qps::SelftestOptions opt;
    opt.restore_tolerance = restore_tolerance;
    const auto rep = qps::selftest(opt);
    for (const auto& item : rep.items)
        std::cout << (item.passed ? "PASS " : "FAIL ") << item.name << "  (" << item.detail << ")\n";
    std::cout << (rep.all_passed() ? "selftest: all passed\n" : "selftest: FAILED\n");
    return rep.all_passed() ? qps::kExitOk : qps::kExitSelftestFailed;
}

int dump_event_matrix(int n, const std::string& format) {
    try {
        const auto k = qps::build_event_matrix(n);
        std::cout << (format == "triplets" ? k.triplets() : k.ascii());
        return qps::kExitOk;
    } catch (const qps::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qps::kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum probability space from marginals measured in distinct contexts"};

    qps::RunConfig cfg;
    std::string output;
    bool selftest = false;
    double restore_tolerance = 1e-9;
    int dump_k = 0;
    std::string dump_format = "ascii";

    const std::map<std::string, qps::InputFormat> formats{{"auto", qps::InputFormat::Auto},
                                                          {"json", qps::InputFormat::Json},
                                                          {"csv", qps::InputFormat::Csv},
                                                          {"contexts", qps::InputFormat::Contexts}};
    const std::map<std::string, qps::RunMode> modes{{"feasibility", qps::RunMode::Feasibility},
                                                    {"density", qps::RunMode::Density},
                                                    {"ranking", qps::RunMode::Ranking},
                                                    {"all", qps::RunMode::All}};

    app.add_option("-i,--input", cfg.inputs,
                   "Marginals file (JSON or CSV), or context CSV files / directories");
    app.add_option("-f,--format", cfg.format, "Input format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app.add_option("-m,--mode", cfg.mode, "Analyses to run")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    app.add_flag("--emit-rho", cfg.emit_rho, "Include the full density matrix (n <= 10)");
    app.add_option("--conditioning", cfg.conditioning, "Conditioning variable for the CI joint")
        ->check(CLI::PositiveNumber);
    app.add_option("--alpha", cfg.alpha, "Neyman-Pearson level for the acceptance region");
    app.add_option("--precision", cfg.precision, "Decimal places in the report");
    app.add_option("--tol-rank", cfg.rank_tolerance,
                   "Relative rank tolerance for the pseudo-inverse (default N * eps)");
    app.add_option("--tol-restore", restore_tolerance, "Restoration bound used by --selftest");
    app.add_option("--top-k", cfg.top_k, "k for the top-k overlap (default N/4)");
    app.add_flag("--strict", cfg.strict, "Treat within-context inconsistencies as errors");
    app.add_flag("--selftest", selftest, "Run the embedded golden checks and exit");
    app.add_option("-o,--output", output, "Write the report here instead of stdout");
    app.add_option("--dump-k", dump_k, "Print the event matrix for n variables and exit");
    app.add_option("--dump-format", dump_format, "Event-matrix dump format")
        ->check(CLI::IsMember({"ascii", "triplets"}));

    CLI11_PARSE(app, argc, argv);

    if (selftest)
        return run_selftest(restore_tolerance);
    if (dump_k != 0)
        return dump_event_matrix(dump_k, dump_format);
    if (cfg.inputs.empty()) {
        std::cerr << "error: --input is required\n" << app.help();
        return qps::kExitInput;
    }

    const auto outcome = qps::run(cfg);
    const std::string text = outcome.report.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << output << "'\n";
            return qps::kExitInput;
        }
        out << text;
    }
    if (outcome.exit_code != qps::kExitOk && outcome.report.contains("error"))
        std::cerr << "error: " << outcome.report["error"]["message"].get<std::string>() << '\n';
    return outcome.exit_code;
}
