#pragma once

#include <vector>

#include "vodiff/field.hpp"
#include "vodiff/order_function.hpp"

namespace vodiff {

/** Density diagnostics of one output time: Fourier normalization, grid
 * positivity, total mass, spatial symmetry. */
struct DensityRow {
    double time;
    double u_hat_zero;      // must be 1 +- 1e-9
    double min_u, max_u;    // min must exceed -1e-6 * max
    double mass;            // trapezoid over the periodic grid, must be 1 +- 1e-6
    double symmetry_defect;
    bool pass;
};

struct DensityReport {
    std::vector<DensityRow> rows;
    bool all_pass;
};

DensityReport density_check(const SpectralField& field);

enum class MSDMethod { kGridMoment, kSpectralLaplacian };

const char* to_string(MSDMethod m);

/** Second spatial moment per output time, either from the grid field
 * (sum |x|^2 u dx) or from -Laplacian_xi u_hat at xi = 0 (4th-order central
 * differences, one-grid-cell step). */
struct MSDSeries {
    std::vector<double> times;
    std::vector<double> msd;
    MSDMethod method;
    std::vector<bool> truncation_warning;  // boundary density above 1e-10 * max
};

MSDSeries msd_compute(const SpectralField& field, MSDMethod method);

/** Deviation from the early-window law MSD = Tr(-A) t^beta0 / Gamma(beta0+1)
 * on (0, 0.9 t*); pass when every covered sample deviates by at most 2%. */
struct SmalltimeRow {
    double time;
    double msd;
    double reference;
    double rel_dev;
    bool in_window;
};

struct SmalltimeReport {
    double t_star;
    std::vector<SmalltimeRow> rows;
    bool pass;
};

SmalltimeReport msd_smalltime_check(const MSDSeries& series, const OrderFunction& of,
                                    const LHParams& lh, const SymbolSpec& sym);

/** Least-squares slope of log MSD vs log t over the series; requires at least
 * one decade of time coverage. */
double msd_largetime_exponent(const MSDSeries& series);

}  // namespace vodiff
