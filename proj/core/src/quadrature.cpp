#include "vodiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vodiff {

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size())
        throw std::invalid_argument("SampledFunction: need matching grid/values with >= 2 nodes");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("SampledFunction: grid must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction: non-finite value");
}

double SampledFunction::value(double t) const {
    if (t < grid_.front() - 1e-12 || t > grid_.back() + 1e-12)
        throw std::domain_error("SampledFunction: argument outside support");
    t = std::clamp(t, grid_.front(), grid_.back());
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    std::size_t i = std::min<std::size_t>(grid_.size() - 1, it - grid_.begin());
    if (i == 0) i = 1;
    double w = (t - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double SampledFunction::slope(std::size_t cell) const {
    return (values_[cell + 1] - values_[cell]) / (grid_[cell + 1] - grid_[cell]);
}

double SampledFunction::slope_before(double t) const {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
    std::size_t i = it - grid_.begin();
    if (i == 0) i = 1;
    if (i >= grid_.size()) i = grid_.size() - 1;
    return slope(i - 1);
}

void QuadratureSpec::validate() const {
    if (!(base_step > 0.0)) throw std::domain_error("QuadratureSpec: base_step must be positive");
    if (!(grading_exponent >= 1.0))
        throw std::domain_error("QuadratureSpec: grading_exponent must be >= 1");
}

namespace quad {

double caputo_weight(double t, double a, double b, double beta) {
    // Int_a^b (t-tau)^(-beta) dtau = ((t-a)^(1-beta) - (t-b)^(1-beta)) / (1-beta)
    double e = 1.0 - beta;
    return (std::pow(t - a, e) - std::pow(t - b, e)) / (e * std::tgamma(e));
}

double weighted_linear_right(double t, double a, double b, double kappa, double c0, double c1) {
    // moments of (t-tau)^(kappa-1) against 1 and tau on [a,b], b <= t
    double sa = std::pow(t - a, kappa), sb = std::pow(t - b, kappa);
    double m0 = (sa - sb) / kappa;
    double m1 = t * m0 - (sa * (t - a) - sb * (t - b)) / (kappa + 1.0);
    return (c0 * m0 + c1 * m1) / std::tgamma(kappa);
}

double weighted_linear_left(double s0, double a, double b, double kappa, double c0, double c1) {
    // moments of (tau-s0)^(kappa-1) against 1 and tau on [a,b], s0 <= a
    double sa = std::pow(a - s0, kappa), sb = std::pow(b - s0, kappa);
    double m0 = (sb - sa) / kappa;
    double m1 = s0 * m0 + (sb * (b - s0) - sa * (a - s0)) / (kappa + 1.0);
    return (c0 * m0 + c1 * m1) / std::tgamma(kappa);
}

std::vector<double> graded_mesh_left(double a, double b, int n, double g) {
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i)
        x[i] = a + (b - a) * std::pow(static_cast<double>(i) / n, g);
    x.front() = a;
    x.back() = b;
    return x;
}

std::vector<double> graded_mesh_both(double a, double b, int n, double g) {
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        double ug = std::pow(u, g);
        double vg = std::pow(1.0 - u, g);
        x[i] = a + (b - a) * ug / (ug + vg);
    }
    x.front() = a;
    x.back() = b;
    return x;
}

std::vector<double> merge_meshes(std::vector<double> base, const std::vector<double>& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15 * (1.0 + std::abs(x)); }),
               base.end());
    return base;
}

}  // namespace quad

namespace {

// Kernel pieces of tau -> beta(mu t + nu tau) on (0, t): [edges, order per piece].
struct KernelPieces {
    std::vector<double> edges;   // 0 = e_0 < ... < e_m = t
    std::vector<double> orders;  // m entries
};

KernelPieces kernel_pieces(const OrderFunction& of, const LHParams& lh, double t) {
    KernelPieces p;
    p.edges.push_back(0.0);
    for (double tau : kernel_breakpoints(of, lh, t)) p.edges.push_back(tau);
    p.edges.push_back(t);
    for (std::size_t i = 0; i + 1 < p.edges.size(); ++i) {
        double mid = 0.5 * (p.edges[i] + p.edges[i + 1]);
        p.orders.push_back(of.at(lh.mu * t + lh.nu * mid));
    }
    return p;
}

void check_support(const SampledFunction& f, double t, const char* op) {
    if (f.t_begin() != 0.0)
        throw std::domain_error(std::string(op) + ": sampled function must start at t = 0");
    if (t > f.t_end() + 1e-12 || !(t > 0.0))
        throw std::domain_error(std::string(op) + ": t outside the sampled support");
}

// Integrates one kernel piece [lo, hi] with constant order, splitting at f's
// grid nodes; `weight` maps a sub-cell to the exact kernel moment.
template <typename CellFn>
void for_each_subcell(const SampledFunction& f, double lo, double hi, CellFn&& fn) {
    const auto& g = f.grid();
    auto it = std::upper_bound(g.begin(), g.end(), lo);
    double a = lo;
    for (; it != g.end() && *it < hi; ++it) {
        if (*it > a + 1e-15 * (1.0 + hi)) {
            fn(a, *it);
            a = *it;
        }
    }
    if (hi > a) fn(a, hi);
}

}  // namespace

double vo_caputo(const SampledFunction& f, const OrderFunction& of, const LHParams& lh, double t,
                 const QuadratureSpec& q) {
    q.validate();
    lh.validate();
    check_support(f, t, "vo_caputo");
    KernelPieces pieces = kernel_pieces(of, lh, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < pieces.orders.size(); ++i) {
        double lo = pieces.edges[i], hi = pieces.edges[i + 1];
        double beta = pieces.orders[i];
        if (beta == 1.0) {
            if (i + 1 == pieces.orders.size()) {
                acc += f.slope_before(t);  // Dirac at tau = t
            } else {
                acc += f.value(hi) - f.value(lo);
            }
            continue;
        }
        for_each_subcell(f, lo, hi, [&](double a, double b) {
            double mid = 0.5 * (a + b);
            acc += f.slope_before(mid + 0.5 * (b - a)) * quad::caputo_weight(t, a, b, beta);
        });
    }
    return acc;
}

namespace {

double vo_integral_impl(const SampledFunction& f, const OrderFunction& of, const LHParams& lh,
                        double t, int k, const QuadratureSpec& q) {
    q.validate();
    lh.validate();
    check_support(f, t, "vo_integral");
    KernelPieces pieces = kernel_pieces(of, lh, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < pieces.orders.size(); ++i) {
        double kappa = k * pieces.orders[i];
        for_each_subcell(f, pieces.edges[i], pieces.edges[i + 1], [&](double a, double b) {
            double s = f.slope_before(0.5 * (a + b) + 0.5 * (b - a));
            double c0 = f.value(a) - s * a;  // f(tau) = c0 + s tau on the cell
            acc += quad::weighted_linear_right(t, a, b, kappa, c0, s);
        });
    }
    return acc;
}

}  // namespace

double vo_integral(const SampledFunction& f, const OrderFunction& of, const LHParams& lh, double t,
                   const QuadratureSpec& q) {
    return vo_integral_impl(f, of, lh, t, 1, q);
}

double vo_integral_power(const SampledFunction& f, const OrderFunction& of, const LHParams& lh,
                         double t, int k, const QuadratureSpec& q) {
    if (k < 1) throw std::domain_error("vo_integral_power: k must be >= 1");
    return vo_integral_impl(f, of, lh, t, k, q);
}

double rl_deriv(const SampledFunction& g, double alpha, double t0, double t,
                const QuadratureSpec& q) {
    q.validate();
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("rl_deriv: alpha must be in (0,1)");
    if (t0 < g.t_begin() - 1e-12 || t > g.t_end() + 1e-12)
        throw std::domain_error("rl_deriv: [t0, t] outside the sampled support");
    double g0 = g.value(t0);
    if (t <= t0) {
        if (g0 != 0.0)
            throw std::domain_error("rl_deriv: t <= t0 with g(t0) != 0, initial term singular");
        return 0.0;
    }
    double acc = g0 * std::pow(t - t0, -alpha) / std::tgamma(1.0 - alpha);
    for_each_subcell(g, t0, t, [&](double a, double b) {
        acc += g.slope_before(0.5 * (a + b) + 0.5 * (b - a)) * quad::caputo_weight(t, a, b, alpha);
    });
    return acc;
}

double psi_bound(double T, double beta_min) {
    return T < 1.0 ? std::pow(T, beta_min) : T;
}

}  // namespace vodiff
