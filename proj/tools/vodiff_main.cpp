// Scenario runner for variable-order subdiffusion problems: parses a JSON
// scenario, runs the requested solver pipeline and writes plot-ready CSVs
// plus a pass/fail report.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vodiff/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"variable-order subdiffusion scenario runner"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, solver;
    int refine = 0;

    auto* run = app.add_subcommand("run", "run the full pipeline and write CSV artifacts");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (overrides the scenario)");
    run->add_option("--solver", solver, "spectral|oracle|hybrid|both (overrides the scenario)");
    run->add_option("--refine", refine, "halve the oracle step / double cache sizes k times")
        ->check(CLI::Range(0, 6));

    auto* classify = app.add_subcommand("classify", "write memory_report.csv only");
    classify->add_option("scenario", scenario_path, "scenario JSON file")->required();
    classify->add_option("--out", out_dir, "output directory (overrides the scenario)");

    CLI11_PARSE(app, argc, argv);

    try {
        vodiff::Scenario scenario = vodiff::parse_scenario_file(scenario_path);
        vodiff::RunOptions opt;
        opt.out_dir = out_dir;
        opt.refine = refine;
        if (!solver.empty()) {
            if (solver == "spectral") opt.solver = vodiff::SolverKind::kSpectral;
            else if (solver == "oracle") opt.solver = vodiff::SolverKind::kOracle;
            else if (solver == "hybrid") opt.solver = vodiff::SolverKind::kHybrid;
            else if (solver == "both") opt.solver = vodiff::SolverKind::kBoth;
            else {
                std::cerr << "unknown solver '" << solver << "'\n";
                return 2;
            }
        }
        vodiff::RunResult result = app.got_subcommand(classify)
                                       ? vodiff::classify_scenario(scenario, opt)
                                       : vodiff::run_scenario(scenario, opt);
        std::cout << result.report_text;
        if (!result.ok) {
            std::cerr << result.failures.size() << " check(s) failed, see " << result.out_dir
                      << "/report.txt\n";
            return 1;
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
