#pragma once

#include <memory>
#include <vector>

#include "vodiff/field.hpp"
#include "vodiff/order_function.hpp"
#include "vodiff/quadrature.hpp"
#include "vodiff/symbol_spec.hpp"

namespace vodiff {

struct SpectralConfig {
    int cache_nodes = 512;   // R/P caches per mode interval
    int delta_nodes = 1024;  // propagator lookup resolution inside quadratures
    int quad_nodes = 384;    // integrand mesh per completed mode interval
    double grading = 3.0;    // endpoint clustering of the quadrature meshes
    double tail_tolerance = 1e-6;  // boundary |u_hat| guard in field synthesis

    void validate() const;
};

/** Critical times t_cr_j = T_j/(mu+nu) paired with the mode orders; window k
 * is [t_cr_k, t_cr_{k+1}).  Requires mu+nu > 0. */
struct CriticalSchedule {
    std::vector<double> t_cr;  // t_cr[0] = 0, strictly increasing
    std::vector<double> beta;  // one order per window, |t_cr| entries

    static CriticalSchedule from(const OrderFunction& of, const LHParams& lh);

    int num_windows() const { return static_cast<int>(beta.size()); }
    int window(double t) const;
    void validate() const;
};

/** Per-frequency symbol machinery for one lambda = A(xi): the propagators
 * S_j, the products M_k, the memory forcing R_k, the Duhamel corrections P_k
 * and the assembled solution multiplier.
 *
 * The solution value on window k is S_k-propagation of the window-start value
 * c_k plus P_k; c_k carries the product of completed propagators and all
 * earlier Duhamel corrections, which reproduces the k<=2 closed expansion
 * exactly and extends it consistently for deeper windows. */
class SymbolWorkspace {
public:
    SymbolWorkspace(CriticalSchedule sched, double lambda, double t_max,
                    SpectralConfig cfg = {});
    ~SymbolWorkspace();
    SymbolWorkspace(SymbolWorkspace&&) noexcept;
    SymbolWorkspace& operator=(SymbolWorkspace&&) noexcept;

    double value(double t) const;  // assembled multiplier at time t <= t_max
    double S(int j, double t) const;
    double M(int k, double t) const;
    double R(int k, double t) const;
    double P(int k, double t) const;
    double window_start_value(int k) const;  // c_k
    double lambda() const;
    const CriticalSchedule& schedule() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Thin wrappers mirroring the per-symbol operations; lambda = A(xi).
double symbol_S(int j, double t, double lambda, const CriticalSchedule& sched);
double symbol_M(int k, double t, double lambda, const CriticalSchedule& sched);
double symbol_R(int k, double t, double lambda, const CriticalSchedule& sched,
                const SpectralConfig& cfg = {});

/** Closed-form solution multiplier for the nu = 0 problem.  Adjacent equal
 * orders are merged first, so a constant order function reduces exactly to
 * E_beta(t^beta A(xi)).  Rejects nu != 0 (use HybridScalarSolver there). */
class SolutionSymbol {
public:
    SolutionSymbol(const OrderFunction& of, const LHParams& lh, double t_max,
                   SpectralConfig cfg = {});

    double value(double t, double lambda) const;
    std::vector<double> values(const std::vector<double>& times, double lambda) const;
    const CriticalSchedule& schedule() const { return sched_; }

private:
    CriticalSchedule sched_;
    double t_max_;
    SpectralConfig cfg_;
};

double assemble_solution_symbol(double t, double lambda, const OrderFunction& of,
                                const LHParams& lh, const SpectralConfig& cfg = {});

/** t* of the pure-beta_0 early window: min{T_1/mu, T_1/(mu+nu)} with infinity
 * for vanishing denominators; +inf when the order function never changes. */
double reduce_early_window(const OrderFunction& of, const LHParams& lh);

/** Late-window reduction: past T* = max{T_N/mu, T_N/(mu+nu)} the problem is
 * the constant-beta_N one based at T* with initial data u(T*, .) and forcing
 * assembled from the completed history.  Rejects long-memory parameter lines
 * (mu = 0 or mu + nu = 0). */
struct LateWindowPlan {
    double T_star;
    double beta_N;
};
LateWindowPlan reduce_late_window(const OrderFunction& of, const LHParams& lh);

/** Per-frequency hybrid solver for general nu: closed form before t*, oracle
 * stepping on [t*, T*], and the beta_N Duhamel continuation past T* with
 * initial data and forcing taken from the stepped history. */
class HybridScalarSolver {
public:
    struct Config {
        double oracle_step = 2e-3;
        double grading = 2.0;
        SpectralConfig spectral;
    };

    HybridScalarSolver(const OrderFunction& of, const LHParams& lh, double lambda, double t_max);
    HybridScalarSolver(const OrderFunction& of, const LHParams& lh, double lambda, double t_max,
                       Config cfg);
    ~HybridScalarSolver();
    HybridScalarSolver(HybridScalarSolver&&) noexcept;

    double value(double t) const;
    double t_star() const;
    double T_star() const;
    /// |_{T*}D*^{beta_N} u(t) - lambda u(t) - f*(t)| for t > T*.
    double late_equation_residual(double t) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/** Fundamental solution (phi-hat = 1) on the given grid at the given times
 * via the closed-form nu = 0 path; throws for nu != 0. */
SpectralField fundamental_solution(const SymbolSpec& sym, const OrderFunction& of,
                                   const LHParams& lh, const SpatialGrid& grid,
                                   const std::vector<double>& times, SpectralConfig cfg = {});

/** As above but per-frequency hybrid (valid for any admissible nu). */
struct HybridFieldConfig {
    double oracle_step = 2e-3;
    double grading = 2.0;
    SpectralConfig spectral;
};
SpectralField field_hybrid(const SymbolSpec& sym, const OrderFunction& of, const LHParams& lh,
                           const SpatialGrid& grid, const std::vector<double>& times,
                           HybridFieldConfig cfg = {});

}  // namespace vodiff
