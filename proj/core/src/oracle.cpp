#include "vodiff/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vodiff/mittag_leffler.hpp"

#include "half_spectrum.hpp"

namespace vodiff {

void ScalarVOProblem::validate() const {
    lh.validate();
    if (lambda > 0.0) throw std::domain_error("ScalarVOProblem: lambda must be <= 0");
    if (!(t_end > 0.0)) throw std::domain_error("ScalarVOProblem: t_end must be positive");
    if (!(base_step > 0.0)) throw std::domain_error("ScalarVOProblem: base_step must be positive");
    if (!(grading_exponent >= 1.0))
        throw std::domain_error("ScalarVOProblem: grading_exponent must be >= 1");
}

namespace {

// Actual mode change times: T_j/mu and T_j/(mu+nu) where finite.
std::vector<double> critical_times(const OrderFunction& of, const LHParams& lh, double t_end) {
    std::vector<double> c;
    for (double T : of.breakpoints()) {
        if (lh.mu > 0.0) c.push_back(T / lh.mu);
        if (lh.mu + lh.nu > 0.0) c.push_back(T / (lh.mu + lh.nu));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    c.erase(std::remove_if(c.begin(), c.end(), [&](double x) { return x >= t_end; }), c.end());
    return c;
}

}  // namespace

std::vector<double> oracle_time_grid(const ScalarVOProblem& p, const std::vector<double>& extra) {
    p.validate();
    std::vector<double> seg_edges{0.0};
    for (double c : critical_times(p.of, p.lh, p.t_end)) seg_edges.push_back(c);
    seg_edges.push_back(p.t_end);

    std::vector<double> grid{0.0};
    for (std::size_t s = 0; s + 1 < seg_edges.size(); ++s) {
        double a = seg_edges[s], b = seg_edges[s + 1];
        // Graded toward the segment start, where the solution loses regularity.
        // Stronger grading at t=0 to recover the L1 rate for small beta.
        double g = p.grading_exponent;
        if (s == 0) {
            double b0 = p.of.values().front();
            g = std::max(g, (2.0 - b0) / b0);
        }
        double b_geo = std::min(b, std::max(p.geometric_from, a));
        int n = std::max(4, static_cast<int>(std::ceil(g * (b_geo - a) / p.base_step)));
        n = std::min(n, 400000);
        for (int i = 1; i <= n; ++i)
            grid.push_back(a + (b_geo - a) * std::pow(static_cast<double>(i) / n, g));
        if (b_geo < b) {  // geometric stretch for long horizons
            double h = p.base_step;
            double t = b_geo;
            while (t < b) {
                t = std::min(b, t + h);
                grid.push_back(t);
                h *= p.geometric_ratio;
            }
        }
    }
    grid = quad::merge_meshes(std::move(grid), extra);
    grid.erase(std::remove_if(grid.begin(), grid.end(),
                              [&](double t) { return t > p.t_end + 1e-12; }),
               grid.end());
    return grid;
}

std::vector<std::vector<double>> step_solve_batch(const OrderFunction& of, const LHParams& lh,
                                                  const std::vector<double>& grid,
                                                  const std::vector<double>& lambdas, double y0) {
    const std::size_t m = grid.size();
    const std::size_t nl = lambdas.size();
    std::vector<std::vector<double>> y(nl, std::vector<double>(m));
    std::vector<std::vector<double>> slope(nl, std::vector<double>(m > 0 ? m - 1 : 0));
    for (auto& yi : y) yi[0] = y0;

    std::vector<double> w;  // weight on slope_i at the current step, shared across lambdas
    for (std::size_t n = 1; n < m; ++n) {
        const double t = grid[n];
        w.assign(n, 0.0);
        // kernel pieces of tau -> beta(mu t + nu tau) on (0, t)
        std::vector<double> edges{0.0};
        for (double tau : kernel_breakpoints(of, lh, t)) edges.push_back(tau);
        edges.push_back(t);
        for (std::size_t pc = 0; pc + 1 < edges.size(); ++pc) {
            const double lo = edges[pc], hi = edges[pc + 1];
            const double beta = of.at(lh.mu * t + lh.nu * 0.5 * (lo + hi));
            if (beta == 1.0) {
                if (pc + 2 == edges.size()) {
                    w[n - 1] += 1.0;  // Dirac at tau = t picks the current slope
                } else {
                    // endpoint difference: sum of slope_i * overlap length
                    for (std::size_t i = 0; i < n; ++i) {
                        double a = std::max(grid[i], lo), b = std::min(grid[i + 1], hi);
                        if (b > a) w[i] += b - a;
                    }
                }
                continue;
            }
            // first history cell overlapping the piece
            auto it = std::upper_bound(grid.begin(), grid.begin() + n + 1, lo);
            std::size_t i = (it == grid.begin()) ? 0 : (it - grid.begin()) - 1;
            for (; i < n && grid[i] < hi; ++i) {
                double a = std::max(grid[i], lo), b = std::min(grid[i + 1], hi);
                if (b > a) w[i] += quad::caputo_weight(t, a, b, beta);
            }
        }
        const double h_last = grid[n] - grid[n - 1];
        const double diag = w[n - 1] / h_last;
        for (std::size_t l = 0; l < nl; ++l) {
            double mem = 0.0;
            const double* s = slope[l].data();
            for (std::size_t i = 0; i + 1 < n; ++i) mem += s[i] * w[i];
            // diag*(y_n - y_{n-1}) + mem = lambda*y_n
            double yn = (diag * y[l][n - 1] - mem) / (diag - lambdas[l]);
            y[l][n] = yn;
            slope[l][n - 1] = (yn - y[l][n - 1]) / h_last;
        }
    }
    return y;
}

SampledFunction step_solve(const ScalarVOProblem& p, const std::vector<double>& extra_nodes) {
    p.validate();
    std::vector<double> grid = oracle_time_grid(p, extra_nodes);
    auto y = step_solve_batch(p.of, p.lh, grid, {p.lambda}, p.y0);
    return SampledFunction(std::move(grid), std::move(y[0]));
}

SampledFunction step_solve(const ScalarVOProblem& p) { return step_solve(p, {}); }

SpectralField field_oracle(const SymbolSpec& sym, const OrderFunction& of, const LHParams& lh,
                           const SpatialGrid& grid, const std::vector<double>& times,
                           OracleFieldConfig cfg) {
    sym.validate();
    grid.validate();
    lh.validate();
    if (times.empty()) throw std::invalid_argument("field_oracle: no output times");
    if (sym.dimension != grid.dimension)
        throw std::invalid_argument("field_oracle: symbol/grid dimension mismatch");
    for (double t : times)
        if (!(t > 0.0)) throw std::invalid_argument("field_oracle: output times must be positive");

    ScalarVOProblem proto;
    proto.lambda = 0.0;
    proto.of = of;
    proto.lh = lh;
    proto.t_end = *std::max_element(times.begin(), times.end());
    proto.base_step = cfg.base_step;
    proto.grading_exponent = cfg.grading;
    proto.geometric_from = cfg.geometric_from;
    proto.geometric_ratio = cfg.geometric_ratio;
    std::vector<double> tgrid = oracle_time_grid(proto, times);

    // output node indices (times were inserted exactly)
    std::vector<std::size_t> out_idx(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
        auto it = std::lower_bound(tgrid.begin(), tgrid.end(), times[s] - 1e-12);
        if (it == tgrid.end() || std::abs(*it - times[s]) > 1e-9)
            throw std::logic_error("field_oracle: output time missing from the grid");
        out_idx[s] = it - tgrid.begin();
    }

    SpectralField field;
    field.grid = grid;
    field.provenance = Provenance::kOracle;
    field.slices.resize(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
        field.slices[s].time = times[s];
        field.slices[s].u_hat.assign(grid.total_points(), 0.0);
    }

    const auto points = detail::half_spectrum(sym, grid);
    const std::size_t batch = std::max(1, cfg.batch);
    for (std::size_t lo = 0; lo < points.size(); lo += batch) {
        std::size_t hi = std::min(points.size(), lo + batch);
        std::vector<double> lambdas;
        lambdas.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) lambdas.push_back(points[i].lambda);
        auto histories = step_solve_batch(of, lh, tgrid, lambdas, 1.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& y = histories[i - lo];
            for (std::size_t s = 0; s < times.size(); ++s) {
                double v = y[out_idx[s]];
                for (int m = 0; m < points[i].num_targets; ++m)
                    field.slices[s].u_hat[points[i].targets[m]] = v;
            }
        }
    }

    for (auto& slice : field.slices) {
        double resid = 0.0;
        double tail = grid.dimension == 1 ? std::abs(slice.u_hat[0]) : 0.0;
        if (grid.dimension == 2) {
            for (int k = 0; k < grid.points; ++k) {
                tail = std::max(tail, std::abs(slice.u_hat[k]));
                tail = std::max(tail,
                                std::abs(slice.u_hat[static_cast<std::size_t>(k) * grid.points]));
            }
        }
        field.max_boundary_tail = std::max(field.max_boundary_tail, tail);
        slice.u = synthesize_field(grid, slice.u_hat, &resid);
        field.max_imag_residue = std::max(field.max_imag_residue, resid);
    }
    return field;
}

SampledFunction picard_first_interval(const ScalarVOProblem& p, int m, int num_nodes) {
    p.validate();
    if (m < 0) throw std::domain_error("picard_first_interval: iteration count must be >= 0");
    const double beta0 = p.of.values().front();
    if (!p.of.breakpoints().empty()) {
        double t_first = critical_times(p.of, p.lh, std::numeric_limits<double>::infinity())
                             .front();
        if (p.t_end >= t_first)
            throw std::domain_error("picard_first_interval: t_end must precede the first "
                                    "critical time");
    }
    std::vector<double> grid(num_nodes), vals(num_nodes);
    for (int i = 0; i < num_nodes; ++i) {
        double t = p.t_end * i / (num_nodes - 1);
        grid[i] = t;
        double sum = 0.0, pw = 1.0;  // lambda^k t^(beta0 k)
        for (int k = 0; k <= m; ++k) {
            sum += pw * detail::reciprocal_gamma(beta0 * k + 1.0);
            pw *= p.lambda * std::pow(t, beta0);
        }
        vals[i] = p.y0 * sum;
    }
    return SampledFunction(std::move(grid), std::move(vals));
}

}  // namespace vodiff
