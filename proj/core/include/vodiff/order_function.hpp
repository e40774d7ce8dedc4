#pragma once

#include <vector>

namespace vodiff {

/** Piecewise-constant order function beta(s): values[k] on [T_k, T_{k+1})
 * with T_0 = 0 and T_{N+1} = +inf.  Intervals are right-open, so
 * at(T_k) == values[k]. */
class OrderFunction {
public:
    // breakpoints: strictly increasing, positive; values: one more entry,
    // each in (0,1].  A constant order function has no breakpoints.
    OrderFunction(std::vector<double> breakpoints, std::vector<double> values);
    OrderFunction() : values_{1.0} {}  // classical first derivative
    static OrderFunction constant(double beta) { return OrderFunction({}, {beta}); }

    double at(double s) const;
    int piece_index(double s) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    int num_modes() const { return static_cast<int>(values_.size()); }

    double min_order() const;
    double max_order() const;
    bool is_constant() const { return values_.size() == 1; }

    /// Merges adjacent pieces with equal beta; drops redundant breakpoints.
    OrderFunction canonical() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/** Lorenzo-Hartley operator parameters (mu, nu).  Admissible iff the pair
 * lies in the causality parallelogram 0 <= mu <= 1, -1 <= nu <= 1,
 * 0 <= mu + nu <= 1. */
struct LHParams {
    double mu;
    double nu;

    bool admissible() const;
    void validate() const;  // throws std::domain_error outside the parallelogram
};

/** The weakly singular kernel 1/(Gamma(1-beta(mu t + nu tau)) (t-tau)^beta(...)).
 * Requires 0 <= tau < t.  Throws std::domain_error when the active order is 1
 * (the kernel degenerates to a Dirac contribution at tau = t; quadrature
 * callers special-case such pieces instead of evaluating the kernel). */
double kernel_eval(const OrderFunction& of, const LHParams& lh, double t, double tau);

/// True when the kernel order at (t, tau) is exactly 1.
bool kernel_order_is_one(const OrderFunction& of, const LHParams& lh, double t, double tau);

/** All tau_j = (T_j - mu t)/nu strictly inside (0, t), ascending: the points
 * where tau -> kernel(t, tau) switches order.  Empty for nu = 0. */
std::vector<double> kernel_breakpoints(const OrderFunction& of, const LHParams& lh, double t);

}  // namespace vodiff
