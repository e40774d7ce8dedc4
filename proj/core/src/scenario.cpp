#include "vodiff/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vodiff/memory.hpp"
#include "vodiff/oracle.hpp"

namespace vodiff {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(SolverKind s) {
    switch (s) {
        case SolverKind::kSpectral: return "spectral";
        case SolverKind::kOracle: return "oracle";
        case SolverKind::kHybrid: return "hybrid";
        case SolverKind::kBoth: return "both";
    }
    return "?";
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail_field(const std::string& where, const std::string& what) {
    throw std::invalid_argument("scenario." + where + ": " + what);
}

double need_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail_field(where, "expected a number");
    return j.get<double>();
}

double get_number(const json& obj, const std::string& key, const std::string& where,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail_field(where + "." + key, "missing required field");
    }
    return need_number(obj.at(key), where + "." + key);
}

std::vector<double> resolve_times(const json& j) {
    std::vector<double> times;
    if (j.is_array()) {
        for (const auto& v : j) times.push_back(need_number(v, "times[]"));
    } else if (j.is_object()) {
        double t0 = get_number(j, "t_start", "times");
        double t1 = get_number(j, "t_end", "times");
        int count = static_cast<int>(get_number(j, "count", "times"));
        std::string spacing = j.value("spacing", "linear");
        if (count < 2) fail_field("times.count", "need at least 2");
        if (!(t1 > t0)) fail_field("times.t_end", "must exceed t_start");
        for (int i = 0; i < count; ++i) {
            double w = static_cast<double>(i) / (count - 1);
            if (spacing == "linear") {
                times.push_back(t0 + w * (t1 - t0));
            } else if (spacing == "log") {
                if (!(t0 > 0.0)) fail_field("times.t_start", "log spacing needs t_start > 0");
                times.push_back(t0 * std::pow(t1 / t0, w));
            } else {
                fail_field("times.spacing", "expected \"linear\" or \"log\"");
            }
        }
    } else {
        fail_field("times", "expected an array or a range object");
    }
    if (times.empty()) fail_field("times", "no output times");
    for (double t : times)
        if (!(t > 0.0)) fail_field("times", "output times must be positive");
    if (!std::is_sorted(times.begin(), times.end()))
        fail_field("times", "output times must be ascending");
    return times;
}

SymbolSpec parse_symbol(const json& j, int dimension) {
    if (!j.is_object()) fail_field("symbol", "expected an object");
    std::string family = j.value("family", "");
    if (family == "quadratic_form") {
        if (!j.contains("matrix") || !j.at("matrix").is_array())
            fail_field("symbol.matrix", "expected an array of rows");
        const auto& rows = j.at("matrix");
        if (static_cast<int>(rows.size()) != dimension)
            fail_field("symbol.matrix", "row count must equal grid.dimension");
        std::vector<double> m;
        for (const auto& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != dimension)
                fail_field("symbol.matrix", "each row needs grid.dimension entries");
            for (const auto& v : row) m.push_back(need_number(v, "symbol.matrix[][]"));
        }
        return SymbolSpec::quadratic(std::move(m), dimension);
    }
    if (family == "riesz")
        return SymbolSpec::riesz(get_number(j, "alpha", "symbol"), dimension);
    fail_field("symbol.family", "expected \"quadratic_form\" or \"riesz\"");
}

SolverKind parse_solver(const std::string& s) {
    if (s == "spectral") return SolverKind::kSpectral;
    if (s == "oracle") return SolverKind::kOracle;
    if (s == "hybrid") return SolverKind::kHybrid;
    if (s == "both") return SolverKind::kBoth;
    fail_field("solver", "expected spectral|oracle|hybrid|both, got \"" + s + "\"");
}

}  // namespace

void Scenario::validate() const {
    lh.validate();
    symbol.validate();
    grid.validate();
    quad.validate();
    spectral.validate();
    if (name.empty()) fail_field("name", "must not be empty");
    if (symbol.dimension != grid.dimension)
        fail_field("symbol", "dimension must match grid.dimension");
    if (times.empty()) fail_field("times", "no output times");
}

Scenario parse_scenario_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");
    if (!j.contains("name") || !j.at("name").is_string())
        fail_field("name", "missing or not a string");
    if (!j.contains("lh") || !j.at("lh").is_object()) fail_field("lh", "missing object");
    if (!j.contains("order") || !j.at("order").is_object()) fail_field("order", "missing object");
    if (!j.contains("grid") || !j.at("grid").is_object()) fail_field("grid", "missing object");
    if (!j.contains("times")) fail_field("times", "missing");
    if (!j.contains("symbol")) fail_field("symbol", "missing");

    LHParams lh{get_number(j.at("lh"), "mu", "lh"), get_number(j.at("lh"), "nu", "lh")};
    if (!lh.admissible())
        fail_field("lh", "(mu, nu) outside the causality parallelogram 0<=mu<=1, -1<=nu<=1, "
                         "0<=mu+nu<=1");

    const auto& jo = j.at("order");
    std::vector<double> bp, vals;
    if (jo.contains("breakpoints"))
        for (const auto& v : jo.at("breakpoints"))
            bp.push_back(need_number(v, "order.breakpoints[]"));
    if (!jo.contains("values") || !jo.at("values").is_array())
        fail_field("order.values", "missing array");
    for (const auto& v : jo.at("values")) vals.push_back(need_number(v, "order.values[]"));
    OrderFunction of = [&] {
        try {
            return OrderFunction(bp, vals);
        } catch (const std::exception& e) {
            fail_field("order", e.what());
        }
    }();

    SpatialGrid grid;
    grid.dimension = static_cast<int>(get_number(j.at("grid"), "dimension", "grid", 1.0));
    grid.points = static_cast<int>(get_number(j.at("grid"), "points", "grid"));
    grid.x_halfwidth = get_number(j.at("grid"), "x_halfwidth", "grid");
    try {
        grid.validate();
    } catch (const std::exception& e) {
        fail_field("grid", e.what());
    }

    Scenario s{j.at("name").get<std::string>(),
               lh,
               std::move(of),
               parse_symbol(j.at("symbol"), grid.dimension),
               grid,
               resolve_times(j.at("times")),
               SolverKind::kSpectral,
               {},
               {},
               std::numeric_limits<double>::infinity(),
               {},
               {},
               ""};

    if (j.contains("solver")) s.solver = parse_solver(j.at("solver").get<std::string>());
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        s.quad.base_step = get_number(q, "base_step", "quadrature", s.quad.base_step);
        s.quad.grading_exponent =
            get_number(q, "grading_exponent", "quadrature", s.quad.grading_exponent);
    }
    if (j.contains("spectral")) {
        const auto& sp = j.at("spectral");
        s.spectral.cache_nodes =
            static_cast<int>(get_number(sp, "cache_nodes", "spectral", s.spectral.cache_nodes));
        s.spectral.delta_nodes =
            static_cast<int>(get_number(sp, "delta_nodes", "spectral", s.spectral.delta_nodes));
        s.spectral.quad_nodes =
            static_cast<int>(get_number(sp, "quad_nodes", "spectral", s.spectral.quad_nodes));
        s.spectral.grading = get_number(sp, "grading", "spectral", s.spectral.grading);
    }
    if (j.contains("oracle")) {
        s.oracle_geometric_from = get_number(j.at("oracle"), "geometric_from", "oracle",
                                             s.oracle_geometric_from);
    }
    if (j.contains("checks")) {
        const auto& c = j.at("checks");
        s.checks.density = c.value("density", s.checks.density);
        s.checks.msd = c.value("msd", s.checks.msd);
        s.checks.smalltime = c.value("smalltime", s.checks.smalltime);
        s.checks.largetime = c.value("largetime", s.checks.largetime);
        if (c.contains("largetime_exponent"))
            s.checks.largetime_exponent =
                need_number(c.at("largetime_exponent"), "checks.largetime_exponent");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        s.tol.symbol_discrepancy =
            get_number(t, "symbol_discrepancy", "tolerances", s.tol.symbol_discrepancy);
        s.tol.field_discrepancy =
            get_number(t, "field_discrepancy", "tolerances", s.tol.field_discrepancy);
    }
    s.output_dir = j.value("output_dir", "out/" + s.name);
    try {
        s.quad.validate();
        s.spectral.validate();
    } catch (const std::exception& e) {
        fail_field("quadrature/spectral", e.what());
    }
    s.validate();
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

struct Reporter {
    std::ostringstream text;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& line) {
        text << (ok ? "[PASS] " : "[FAIL] ") << line << "\n";
        if (!ok) failures.push_back(line);
    }
    void note(const std::string& line) { text << line << "\n"; }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string memory_report_csv(const OrderFunction& of, const LHParams& lh) {
    std::ostringstream csv;
    csv << "T,memory_class,t_low,t_high\n";
    if (!of.breakpoints().empty()) {
        MemoryReport report = classify_memory(of, lh);
        for (const auto& w : report.windows)
            csv << format_double(w.mode_change_time) << ',' << to_string(w.memory_class) << ','
                << format_double(w.t_low) << ',' << format_double(w.t_high) << "\n";
    }
    return csv.str();
}

std::string field_csv(const SpectralField& field, std::size_t slice_idx) {
    const auto& grid = field.grid;
    const auto& s = field.slices[slice_idx];
    std::ostringstream csv;
    if (grid.dimension == 1) {
        csv << "x,u\n";
        for (int jx = 0; jx < grid.points; ++jx)
            csv << format_double(grid.x(jx)) << ',' << format_double(s.u[jx]) << "\n";
    } else {
        csv << "x0,x1,u\n";
        for (int j1 = 0; j1 < grid.points; ++j1)
            for (int j2 = 0; j2 < grid.points; ++j2)
                csv << format_double(grid.x(j1)) << ',' << format_double(grid.x(j2)) << ','
                    << format_double(s.u[static_cast<std::size_t>(j1) * grid.points + j2])
                    << "\n";
    }
    return csv.str();
}

std::string symbol_csv(const SpectralField& field, std::size_t slice_idx) {
    const auto& grid = field.grid;
    const auto& s = field.slices[slice_idx];
    std::ostringstream csv;
    if (grid.dimension == 1) {
        csv << "xi,u_hat\n";
        for (int k = 0; k < grid.points; ++k)
            csv << format_double(grid.xi(k)) << ',' << format_double(s.u_hat[k]) << "\n";
    } else {
        csv << "xi0,xi1,u_hat\n";
        for (int k1 = 0; k1 < grid.points; ++k1)
            for (int k2 = 0; k2 < grid.points; ++k2)
                csv << format_double(grid.xi(k1)) << ',' << format_double(grid.xi(k2)) << ','
                    << format_double(s.u_hat[static_cast<std::size_t>(k1) * grid.points + k2])
                    << "\n";
    }
    return csv.str();
}

// Mixing windows that any requested time falls into, for applicability errors.
std::string mixing_conflict(const Scenario& s) {
    if (s.of.canonical().breakpoints().empty()) return "";
    if (s.lh.mu == 0.0 || s.lh.mu + s.lh.nu == 0.0)
        return "long-memory parameters (mu = 0 or mu + nu = 0): the old mode never expires, no "
               "closed-form reduction exists";
    MemoryReport report = classify_memory(s.of.canonical(), s.lh);
    for (const auto& w : report.windows)
        for (double t : s.times)
            if (t > w.t_low && t < w.t_high) {
                std::ostringstream os;
                os << "t = " << format_double(t) << " lies inside the mixing window ("
                   << format_double(w.t_low) << ", " << format_double(w.t_high)
                   << ") of the mode change at T = " << format_double(w.mode_change_time);
                return os.str();
            }
    return "";
}

}  // namespace

RunResult classify_scenario(const Scenario& s, const RunOptions& opt) {
    s.validate();
    RunResult result;
    result.out_dir = opt.out_dir.empty() ? s.output_dir : opt.out_dir;
    fs::create_directories(result.out_dir);
    write_file(fs::path(result.out_dir) / "memory_report.csv", memory_report_csv(s.of, s.lh));
    result.report_text = "memory_report.csv written\n";
    return result;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
    s.validate();
    RunResult result;
    result.out_dir = opt.out_dir.empty() ? s.output_dir : opt.out_dir;
    fs::create_directories(result.out_dir);
    const fs::path out(result.out_dir);
    Reporter rep;

    SolverKind solver = opt.solver.value_or(s.solver);
    QuadratureSpec quad = s.quad;
    SpectralConfig spectral = s.spectral;
    for (int r = 0; r < opt.refine; ++r) {
        quad.base_step *= 0.5;
        spectral.cache_nodes = std::min(8192, spectral.cache_nodes * 2);
        spectral.delta_nodes = std::min(16384, spectral.delta_nodes * 2);
        spectral.quad_nodes = std::min(8192, spectral.quad_nodes * 2);
    }

    rep.note("scenario: " + s.name);
    rep.note("solver: " + std::string(to_string(solver)));

    // 1. memory classification
    write_file(out / "memory_report.csv", memory_report_csv(s.of, s.lh));
    rep.note("memory_report.csv written");

    // 2. applicability
    const bool needs_closed_form = solver == SolverKind::kSpectral || solver == SolverKind::kBoth;
    if (needs_closed_form && s.lh.nu != 0.0) {
        std::string conflict = mixing_conflict(s);
        std::ostringstream os;
        os << "solver '" << to_string(solver) << "' uses the closed-form representation, which "
           << "requires nu = 0 (got nu = " << format_double(s.lh.nu) << ")";
        if (!conflict.empty()) os << "; " << conflict;
        os << "; use solver 'hybrid' or 'oracle'";
        write_file(out / "report.txt", rep.text.str() + "[ERROR] " + os.str() + "\n");
        throw std::domain_error(os.str());
    }

    // 3. solve
    OracleFieldConfig ocfg;
    ocfg.base_step = quad.base_step;
    ocfg.grading = quad.grading_exponent;
    ocfg.geometric_from = s.oracle_geometric_from;

    std::optional<SpectralField> primary, secondary;
    switch (solver) {
        case SolverKind::kSpectral:
            primary = fundamental_solution(s.symbol, s.of, s.lh, s.grid, s.times, spectral);
            break;
        case SolverKind::kOracle:
            primary = field_oracle(s.symbol, s.of, s.lh, s.grid, s.times, ocfg);
            break;
        case SolverKind::kHybrid: {
            HybridFieldConfig hcfg{quad.base_step, quad.grading_exponent, spectral};
            primary = field_hybrid(s.symbol, s.of, s.lh, s.grid, s.times, hcfg);
            break;
        }
        case SolverKind::kBoth:
            primary = fundamental_solution(s.symbol, s.of, s.lh, s.grid, s.times, spectral);
            secondary = field_oracle(s.symbol, s.of, s.lh, s.grid, s.times, ocfg);
            break;
    }

    rep.note("provenance: " + std::string(to_string(primary->provenance)));
    rep.note("max_imag_residue: " + format_double(primary->max_imag_residue));
    rep.note("max_boundary_symbol_tail: " + format_double(primary->max_boundary_tail));
    rep.check(primary->max_boundary_tail <= spectral.tail_tolerance,
              "symbol tail at the frequency boundary <= " +
                  format_double(spectral.tail_tolerance) + " (got " +
                  format_double(primary->max_boundary_tail) + ")");

    if (secondary) {
        double max_sym = 0.0, max_field = 0.0;
        for (std::size_t i = 0; i < primary->slices.size(); ++i) {
            for (std::size_t k = 0; k < primary->slices[i].u_hat.size(); ++k)
                max_sym = std::max(max_sym, std::abs(primary->slices[i].u_hat[k] -
                                                     secondary->slices[i].u_hat[k]));
            for (std::size_t k = 0; k < primary->slices[i].u.size(); ++k)
                max_field = std::max(max_field, std::abs(primary->slices[i].u[k] -
                                                         secondary->slices[i].u[k]));
        }
        rep.note("spectral_vs_oracle_symbol_discrepancy: " + format_double(max_sym));
        rep.note("spectral_vs_oracle_field_discrepancy: " + format_double(max_field));
        rep.check(max_sym <= s.tol.symbol_discrepancy,
                  "per-frequency solver discrepancy <= " +
                      format_double(s.tol.symbol_discrepancy) + " (got " +
                      format_double(max_sym) + ")");
        rep.check(max_field <= s.tol.field_discrepancy,
                  "field-space solver discrepancy <= " + format_double(s.tol.field_discrepancy) +
                      " (got " + format_double(max_field) + ")");
    }

    // 4. artifacts
    for (std::size_t i = 0; i < primary->slices.size(); ++i) {
        std::string stamp = format_double(primary->slices[i].time);
        write_file(out / ("field_t" + stamp + ".csv"), field_csv(*primary, i));
        write_file(out / ("symbol_t" + stamp + ".csv"), symbol_csv(*primary, i));
    }
    rep.note("field/symbol CSVs written for " + std::to_string(primary->slices.size()) +
             " output times");

    // 5. density checks
    if (s.checks.density) {
        DensityReport dr = density_check(*primary);
        for (const auto& row : dr.rows) {
            std::ostringstream os;
            os << "density t=" << format_double(row.time) << ": u_hat(0)="
               << format_double(row.u_hat_zero) << " mass=" << format_double(row.mass)
               << " min_u=" << format_double(row.min_u) << " max_u=" << format_double(row.max_u);
            rep.check(row.pass, os.str());
        }
    }

    // 6. MSD
    if (s.checks.msd && s.symbol.family == SymbolSpec::Family::kQuadraticForm) {
        MSDSeries grid_series = msd_compute(*primary, MSDMethod::kGridMoment);
        MSDSeries spec_series = msd_compute(*primary, MSDMethod::kSpectralLaplacian);
        SmalltimeReport small = msd_smalltime_check(grid_series, s.of, s.lh, s.symbol);

        std::ostringstream csv;
        csv << "t,msd_grid,msd_spectral,smalltime_ref,smalltime_pass,methods_agree\n";
        bool methods_ok = true;
        for (std::size_t i = 0; i < grid_series.times.size(); ++i) {
            double rel = std::abs(grid_series.msd[i] - spec_series.msd[i]) /
                         std::max(1e-300, std::abs(grid_series.msd[i]));
            bool agree = rel <= 0.01;
            if (!grid_series.truncation_warning[i]) methods_ok = methods_ok && agree;
            bool small_ok = !small.rows[i].in_window || small.rows[i].rel_dev <= 0.02;
            csv << format_double(grid_series.times[i]) << ','
                << format_double(grid_series.msd[i]) << ',' << format_double(spec_series.msd[i])
                << ',' << format_double(small.rows[i].reference) << ','
                << (small_ok ? 1 : 0) << ',' << (agree ? 1 : 0) << "\n";
        }
        write_file(out / "msd.csv", csv.str());
        rep.check(methods_ok, "grid-moment and spectral-laplacian MSD agree within 1%");
        if (s.checks.smalltime) {
            bool any_in_window = false;
            for (const auto& row : small.rows) any_in_window |= row.in_window;
            if (any_in_window)
                rep.check(small.pass, "small-time MSD law Tr(-A) t^b0 / Gamma(b0+1) within 2% on "
                                      "(0, 0.9 t*), t* = " +
                                          format_double(small.t_star));
            else
                rep.note("small-time MSD law: no requested time below 0.9 t*, skipped");
        }
        if (s.checks.largetime) {
            double expected = s.checks.largetime_exponent;
            if (std::isnan(expected)) expected = s.of.canonical().values().back();
            double slope = msd_largetime_exponent(grid_series);
            std::ostringstream os;
            os << "large-time MSD exponent " << format_double(slope) << " within +-0.05 of "
               << format_double(expected);
            rep.check(std::abs(slope - expected) <= 0.05, os.str());
        }
    }

    result.failures = rep.failures;
    result.ok = rep.failures.empty();
    rep.note(result.ok ? "RESULT: PASS" : "RESULT: FAIL (" +
                                              std::to_string(result.failures.size()) +
                                              " failed checks)");
    result.report_text = rep.text.str();
    write_file(out / "report.txt", result.report_text);
    return result;
}

}  // namespace vodiff
