#pragma once

#include <limits>
#include <vector>

#include "vodiff/field.hpp"
#include "vodiff/order_function.hpp"
#include "vodiff/quadrature.hpp"

namespace vodiff {

/** Per-frequency reduction of the Cauchy problem: the scalar variable-order
 * equation D_{*mu,nu}^{beta(t)} y = lambda y, y(0) = y0, with lambda = A(xi). */
struct ScalarVOProblem {
    double lambda;  // <= 0
    OrderFunction of;
    LHParams lh;
    double y0 = 1.0;
    double t_end;
    double base_step = 1e-3;
    double grading_exponent = 2.0;  // clustering toward t = 0 and the critical times
    int grading_nodes = 24;         // refined nodes per critical-time neighborhood
    // Mesh stretching for long horizons: geometric step growth after this time.
    double geometric_from = std::numeric_limits<double>::infinity();
    double geometric_ratio = 1.05;

    void validate() const;
};

/** Builds the stepping grid: graded segments between consecutive actual mode
 * change times (T_j/mu and T_j/(mu+nu)), refined near each of them and near
 * t = 0, with `extra` nodes (e.g. output times) inserted exactly. */
std::vector<double> oracle_time_grid(const ScalarVOProblem& p, const std::vector<double>& extra = {});

/** Implicit L1-type stepping: at every node the discretized variable-order
 * Caputo operator applied to the piecewise-linear history (current value
 * included) equals lambda * y_n.  The operator is affine in y_n, so each step
 * is one division; continuity at critical times is automatic (single global
 * history). */
SampledFunction step_solve(const ScalarVOProblem& p);
SampledFunction step_solve(const ScalarVOProblem& p, const std::vector<double>& extra_nodes);

/** Many lambdas on one shared grid; kernel weights are computed once per step
 * and reused across the whole batch.  Returns one history per lambda. */
std::vector<std::vector<double>> step_solve_batch(const OrderFunction& of, const LHParams& lh,
                                                  const std::vector<double>& grid,
                                                  const std::vector<double>& lambdas, double y0);

/** Truncated Picard iteration on the first interval (constant beta_0):
 * the partial sum sum_{k<=m} lambda^k t^(beta_0 k) / Gamma(beta_0 k + 1) y0,
 * sampled on a uniform grid.  Requires t_end below the first critical time. */
SampledFunction picard_first_interval(const ScalarVOProblem& p, int m, int num_nodes = 257);

struct OracleFieldConfig {
    double base_step = 2e-3;
    double grading = 2.0;
    double geometric_from = std::numeric_limits<double>::infinity();
    double geometric_ratio = 1.05;
    int batch = 48;  // lambdas stepped together per shared-weight pass
};

/** Brute-force fundamental solution: step_solve per distinct frequency,
 * mirrored over the grid, then inverse-transformed.  Same grid and slice
 * contract as the spectral path. */
SpectralField field_oracle(const SymbolSpec& sym, const OrderFunction& of, const LHParams& lh,
                           const SpatialGrid& grid, const std::vector<double>& times,
                           OracleFieldConfig cfg = {});

}  // namespace vodiff
