#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vodiff/analysis.hpp"
#include "vodiff/order_function.hpp"
#include "vodiff/quadrature.hpp"
#include "vodiff/spectral.hpp"
#include "vodiff/symbol_spec.hpp"

namespace vodiff {

enum class SolverKind { kSpectral, kOracle, kHybrid, kBoth };

const char* to_string(SolverKind s);

struct ScenarioChecks {
    bool density = true;
    bool msd = true;        // write msd.csv (quadratic symbols only)
    bool smalltime = true;  // small-time law pass flags inside msd.csv
    bool largetime = false; // log-log exponent fit over the whole series
    double largetime_exponent = std::numeric_limits<double>::quiet_NaN();  // default: beta_N
};

struct ScenarioTolerances {
    double symbol_discrepancy = 5e-3;  // solver = both, per-frequency
    double field_discrepancy = 1e-3;   // solver = both, sup norm in x
};

struct Scenario {
    std::string name;
    LHParams lh;
    OrderFunction of;
    SymbolSpec symbol;
    SpatialGrid grid;
    std::vector<double> times;
    SolverKind solver = SolverKind::kSpectral;
    QuadratureSpec quad;  // oracle/hybrid stepping knobs
    SpectralConfig spectral;
    double oracle_geometric_from = std::numeric_limits<double>::infinity();
    ScenarioChecks checks;
    ScenarioTolerances tol;
    std::string output_dir;

    void validate() const;
};

Scenario parse_scenario_json(const std::string& json_text);
Scenario parse_scenario_file(const std::string& path);

struct RunOptions {
    std::string out_dir;  // overrides the scenario's output_dir when non-empty
    std::optional<SolverKind> solver;
    int refine = 0;  // halves the oracle step and doubles cache sizes k times
};

struct RunResult {
    bool ok = true;
    std::vector<std::string> failures;
    std::string report_text;
    std::string out_dir;
};

/// Full pipeline: classify, solve, analyze, write CSV artifacts + report.txt.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

/// Classifier only: writes memory_report.csv.
RunResult classify_scenario(const Scenario& s, const RunOptions& opt = {});

/// Shortest round-trip decimal representation (the CSV float format).
std::string format_double(double v);

}  // namespace vodiff
