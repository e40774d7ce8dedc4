#include "vodiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vodiff/spectral.hpp"

namespace vodiff {

const char* to_string(MSDMethod m) {
    return m == MSDMethod::kGridMoment ? "grid_moment" : "spectral_laplacian";
}

DensityReport density_check(const SpectralField& field) {
    DensityReport report;
    report.all_pass = true;
    const SpatialGrid& grid = field.grid;
    const int M = grid.points;
    const double cell = grid.dimension == 1 ? grid.dx() : grid.dx() * grid.dx();
    for (const auto& slice : field.slices) {
        DensityRow row;
        row.time = slice.time;
        row.u_hat_zero = slice.u_hat[field.zero_xi_index()];
        row.min_u = *std::min_element(slice.u.begin(), slice.u.end());
        row.max_u = *std::max_element(slice.u.begin(), slice.u.end());
        double mass = 0.0;
        for (double v : slice.u) mass += v;
        row.mass = mass * cell;
        double defect = 0.0;
        if (grid.dimension == 1) {
            for (int j = 1; j < M; ++j)
                defect = std::max(defect, std::abs(slice.u[j] - slice.u[M - j]));
        } else {
            for (int j1 = 1; j1 < M; ++j1)
                for (int j2 = 1; j2 < M; ++j2) {
                    std::size_t fwd = static_cast<std::size_t>(j1) * M + j2;
                    std::size_t mir = static_cast<std::size_t>(M - j1) * M + (M - j2);
                    defect = std::max(defect, std::abs(slice.u[fwd] - slice.u[mir]));
                }
        }
        row.symmetry_defect = defect;
        row.pass = std::abs(row.u_hat_zero - 1.0) <= 1e-9 &&
                   row.min_u >= -1e-6 * row.max_u && std::abs(row.mass - 1.0) <= 1e-6;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

MSDSeries msd_compute(const SpectralField& field, MSDMethod method) {
    MSDSeries series;
    series.method = method;
    const SpatialGrid& grid = field.grid;
    const int M = grid.points;
    for (const auto& slice : field.slices) {
        series.times.push_back(slice.time);
        double max_u = *std::max_element(slice.u.begin(), slice.u.end());
        double boundary = 0.0;
        if (grid.dimension == 1) {
            boundary = std::abs(slice.u.front());
        } else {
            for (int k = 0; k < M; ++k) {
                boundary = std::max(boundary, std::abs(slice.u[k]));
                boundary =
                    std::max(boundary, std::abs(slice.u[static_cast<std::size_t>(k) * M]));
            }
        }
        series.truncation_warning.push_back(boundary > 1e-10 * max_u);

        if (method == MSDMethod::kGridMoment) {
            const double cell = grid.dimension == 1 ? grid.dx() : grid.dx() * grid.dx();
            double acc = 0.0;
            if (grid.dimension == 1) {
                for (int j = 0; j < M; ++j) {
                    double x = grid.x(j);
                    acc += x * x * slice.u[j];
                }
            } else {
                for (int j1 = 0; j1 < M; ++j1)
                    for (int j2 = 0; j2 < M; ++j2) {
                        double x1 = grid.x(j1), x2 = grid.x(j2);
                        acc += (x1 * x1 + x2 * x2) *
                               slice.u[static_cast<std::size_t>(j1) * M + j2];
                    }
            }
            series.msd.push_back(acc * cell);
        } else {
            // MSD = -Laplacian_xi u_hat at 0; 4th-order stencil, step = one cell
            const double h = grid.dxi();
            const int z = M / 2;
            auto at = [&](int k1, int k2) {
                return grid.dimension == 1
                           ? slice.u_hat[k1]
                           : slice.u_hat[static_cast<std::size_t>(k1) * M + k2];
            };
            double acc = 0.0;
            for (int axis = 0; axis < grid.dimension; ++axis) {
                auto f = [&](int off) {
                    return axis == 0 ? at(z + off, z) : at(z, z + off);
                };
                double second = (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) /
                                (12.0 * h * h);
                acc -= second;
            }
            series.msd.push_back(acc);
        }
    }
    return series;
}

SmalltimeReport msd_smalltime_check(const MSDSeries& series, const OrderFunction& of,
                                    const LHParams& lh, const SymbolSpec& sym) {
    SmalltimeReport report;
    report.t_star = reduce_early_window(of, lh);
    report.pass = true;
    const double beta0 = of.canonical().values().front();
    const double coeff = sym.trace_neg() / std::tgamma(beta0 + 1.0);
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        SmalltimeRow row;
        row.time = series.times[i];
        row.msd = series.msd[i];
        row.reference = coeff * std::pow(row.time, beta0);
        row.rel_dev = std::abs(row.msd - row.reference) / std::abs(row.reference);
        row.in_window = row.time > 0.0 && row.time <= 0.9 * report.t_star;
        if (row.in_window && row.rel_dev > 0.02) report.pass = false;
        report.rows.push_back(row);
    }
    return report;
}

double msd_largetime_exponent(const MSDSeries& series) {
    if (series.times.size() < 3)
        throw std::domain_error("msd_largetime_exponent: need at least 3 samples");
    double t_min = series.times.front(), t_max = series.times.back();
    if (!(t_max >= 10.0 * t_min * (1.0 - 1e-12)))
        throw std::domain_error("msd_largetime_exponent: series must span at least a decade");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = series.times.size();
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(series.times[i]);
        double y = std::log(series.msd[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace vodiff
