#pragma once

#include <vector>

#include "vodiff/order_function.hpp"

namespace vodiff {

/** Discrete carrier for a function on [grid.front(), grid.back()], read as
 * its piecewise-linear interpolant.  Grid strictly increasing, values finite. */
class SampledFunction {
public:
    SampledFunction(std::vector<double> grid, std::vector<double> values);

    double value(double t) const;       // linear interpolation, clamped domain check
    double slope(std::size_t cell) const;
    double slope_before(double t) const;  // slope of the cell ending at (or containing) t

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double t_begin() const { return grid_.front(); }
    double t_end() const { return grid_.back(); }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

struct QuadratureSpec {
    double base_step = 1e-3;
    double grading_exponent = 2.0;  // >= 1, endpoint clustering strength

    void validate() const;
};

/** Variable-order Caputo derivative
 *   D_{*mu,nu}^{beta(t)} f(t) = Int_0^t f'(tau) / (Gamma(1-b) (t-tau)^b) dtau,
 *   b = beta(mu t + nu tau),
 * for piecewise-linear f: exact per-cell moments of the kernel, the mesh
 * split at f's nodes and at the kernel breakpoints.  Order-1 kernel pieces
 * follow the degenerate convention: a piece ending at tau = t contributes
 * f'(t-), an interior piece contributes f(d) - f(c). */
double vo_caputo(const SampledFunction& f, const OrderFunction& of, const LHParams& lh, double t,
                 const QuadratureSpec& q = {});

/** Variable-order integral
 *   J^{beta(t)} f(t) = Int_0^t (t-tau)^(b-1) f(tau) / Gamma(b) dtau. */
double vo_integral(const SampledFunction& f, const OrderFunction& of, const LHParams& lh, double t,
                   const QuadratureSpec& q = {});

/** k-th power kernel integral Int_0^t (t-tau)^(k b - 1) f(tau) / Gamma(k b) dtau,
 * the integrand of the iterated-integral estimate. */
double vo_integral_power(const SampledFunction& f, const OrderFunction& of, const LHParams& lh,
                         double t, int k, const QuadratureSpec& q = {});

/** Riemann-Liouville derivative of order alpha in (0,1) based at t0,
 * computed as the Caputo derivative plus g(t0) (t-t0)^(-alpha)/Gamma(1-alpha).
 * Throws when t <= t0 and g(t0) != 0 (the initial term is singular). */
double rl_deriv(const SampledFunction& g, double alpha, double t0, double t,
                const QuadratureSpec& q = {});

/// Bound function of the iterated-integral estimate: psi(T) = T^b for T < 1, T otherwise.
double psi_bound(double T, double beta_min);

namespace quad {
// Exact moments used by the product-integration rules.
// Int_a^b (t-tau)^(-beta) dtau / Gamma(1-beta), for a < b <= t, beta < 1:
double caputo_weight(double t, double a, double b, double beta);
// Int_a^b (t-tau)^(kappa-1) (c0 + c1 tau) dtau / Gamma(kappa), kappa > 0:
double weighted_linear_right(double t, double a, double b, double kappa, double c0, double c1);
// Int_a^b (tau-s0)^(kappa-1) (c0 + c1 tau) dtau / Gamma(kappa), s0 <= a < b:
double weighted_linear_left(double s0, double a, double b, double kappa, double c0, double c1);

// Mesh helpers. graded_mesh maps n+1 nodes onto [a,b] with exponent-g
// clustering toward one or both endpoints.
std::vector<double> graded_mesh_left(double a, double b, int n, double g);
std::vector<double> graded_mesh_both(double a, double b, int n, double g);
std::vector<double> merge_meshes(std::vector<double> base, const std::vector<double>& extra);
}  // namespace quad

}  // namespace vodiff
