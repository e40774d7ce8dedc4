#include "vodiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vodiff/memory.hpp"
#include "vodiff/mittag_leffler.hpp"
#include "vodiff/oracle.hpp"
#include "vodiff/parallel.hpp"

#include "half_spectrum.hpp"

namespace vodiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Piecewise-linear lookup table with clamped, binary-searched evaluation.
struct LinearTable {
    std::vector<double> x, y;

    bool empty() const { return x.empty(); }
    double operator()(double xx) const {
        if (xx <= x.front()) return y.front();
        if (xx >= x.back()) return y.back();
        auto it = std::upper_bound(x.begin(), x.end(), xx);
        std::size_t i = it - x.begin();
        double w = (xx - x[i - 1]) / (x[i] - x[i - 1]);
        return y[i - 1] + w * (y[i] - y[i - 1]);
    }
};

// Appends geometrically shrinking nodes approaching `t` from the left of
// `last` (the largest mesh node below t); keeps the quadrature sharp where
// the propagator kink (t - tau)^beta sits.
void refine_toward(std::vector<double>* mesh, double last, double t, int levels = 10) {
    double d = t - last;
    if (d <= 0) return;
    for (int i = 1; i < levels; ++i) {
        double node = t - d * std::pow(0.5, i);
        if (node > last) mesh->push_back(node);
    }
    mesh->push_back(t);
}

}  // namespace

void SpectralConfig::validate() const {
    if (cache_nodes < 16 || delta_nodes < 16 || quad_nodes < 16)
        throw std::domain_error("SpectralConfig: node counts must be >= 16");
    if (!(grading >= 1.0)) throw std::domain_error("SpectralConfig: grading must be >= 1");
    if (!(tail_tolerance > 0.0))
        throw std::domain_error("SpectralConfig: tail_tolerance must be positive");
}

CriticalSchedule CriticalSchedule::from(const OrderFunction& of, const LHParams& lh) {
    lh.validate();
    if (!(lh.mu + lh.nu > 0.0))
        throw std::domain_error("CriticalSchedule: mu + nu = 0 is the long-memory line, no "
                                "finite critical times exist");
    CriticalSchedule s;
    s.t_cr.push_back(0.0);
    s.beta.push_back(of.values().front());
    for (std::size_t k = 0; k < of.breakpoints().size(); ++k) {
        s.t_cr.push_back(of.breakpoints()[k] / (lh.mu + lh.nu));
        s.beta.push_back(of.values()[k + 1]);
    }
    s.validate();
    return s;
}

void CriticalSchedule::validate() const {
    if (t_cr.empty() || t_cr.size() != beta.size() || t_cr.front() != 0.0)
        throw std::domain_error("CriticalSchedule: need t_cr[0]=0 and one order per window");
    for (std::size_t i = 1; i < t_cr.size(); ++i)
        if (!(t_cr[i] > t_cr[i - 1]))
            throw std::domain_error("CriticalSchedule: critical times must increase");
    for (double b : beta)
        if (!(b > 0.0) || b > 1.0)
            throw std::domain_error("CriticalSchedule: orders must lie in (0,1]");
}

int CriticalSchedule::window(double t) const {
    if (t < 0.0) throw std::domain_error("CriticalSchedule: negative time");
    auto it = std::upper_bound(t_cr.begin(), t_cr.end(), t);
    return static_cast<int>(it - t_cr.begin()) - 1;
}

// ---------------------------------------------------------------------------
// SymbolWorkspace
// ---------------------------------------------------------------------------

struct SymbolWorkspace::Impl {
    CriticalSchedule sched;
    double lam;
    double t_max;
    SpectralConfig cfg;

    struct Window {
        double a = 0.0;      // t_cr_k
        double b = 0.0;      // min(t_cr_{k+1}, horizon)
        double beta = 1.0;
        double c = 1.0;      // solution value at the window start
        double R_at_a = 0.0;
        LinearTable prop;    // Delta -> E_b(Delta^b lam)
        LinearTable dprop;   // Delta -> E'_b(Delta^b lam)
        std::vector<double> g;     // cache grid on [a, b]
        std::vector<double> Rv;    // R_k at g
        std::vector<double> capu;  // Caputo part of D^{1-b} R_k at g
        std::vector<double> Pv;    // P_k at g
        std::vector<double> du_mesh;  // integrand mesh for later windows
        std::vector<double> du;       // du/ds of the solution at du_mesh nodes (index >= 1)
        double H_at_a = 0.0;          // lim (s-a)^{1-b} du(s)
        bool has_du = false;
        bool built = false;
    };
    std::vector<Window> win;
    int windows_built = 0;

    Impl(CriticalSchedule s, double lambda, double horizon, SpectralConfig config)
        : sched(std::move(s)), lam(lambda), t_max(horizon), cfg(config) {
        cfg.validate();
        sched.validate();
        if (!(t_max > 0.0)) throw std::domain_error("SymbolWorkspace: horizon must be positive");
        if (lam > 0.0)
            throw std::domain_error("SymbolWorkspace: requires lambda = A(xi) <= 0");
        build();
    }

    double prop_direct(int j, double delta) const {
        double b = sched.beta[j];
        if (delta <= 0.0) return 1.0;
        if (b == 1.0) return std::exp(lam * delta);
        return mlf_eval(b, std::pow(delta, b) * lam);
    }

    double dprop_direct(int j, double delta) const {
        double b = sched.beta[j];
        if (b == 1.0) return std::exp(lam * std::max(delta, 0.0));
        return mlf_deriv(b, std::pow(std::max(delta, 0.0), b) * lam);
    }

    static LinearTable build_table(double len, int n, double grading,
                                   const std::function<double(double)>& f) {
        LinearTable t;
        t.x = quad::graded_mesh_both(0.0, len, n, grading);
        t.y.reserve(t.x.size());
        for (double d : t.x) t.y.push_back(f(d));
        return t;
    }

    // du/ds of the window-i solution at s (interior), from the cached mesh
    // representation.  Only used through the cell loops below.

    // Integral of du_i(s) * (tau - s)^(-bk) over window i, divided by
    // Gamma(1-bk); first cell handled through the rescaled continuous factor
    // H(s) = (s-a)^(1-b_i) du_i(s).
    double window_memory_integral(int i, double tau, double bk) const {
        const Window& w = win[i];
        const double bi = w.beta;
        double acc = 0.0;
        const auto& m = w.du_mesh;
        // first cell [a, m1]
        {
            double delta = m[1] - w.a;
            double H0 = w.H_at_a;
            double H1 = std::pow(delta, 1.0 - bi) * w.du[1];
            double kernel = std::pow(tau - (w.a + 0.5 * delta), -bk);
            double mom0 = std::pow(delta, bi) / bi;
            double mom1 = std::pow(delta, bi) / (bi + 1.0);  // of (s-a)^(b-1) * (s-a)/delta
            acc += kernel * (H0 * mom0 + (H1 - H0) * mom1) / std::tgamma(1.0 - bk);
        }
        for (std::size_t j = 1; j + 1 < m.size(); ++j) {
            double c1 = (w.du[j + 1] - w.du[j]) / (m[j + 1] - m[j]);
            double c0 = w.du[j] - c1 * m[j];
            acc += quad::weighted_linear_right(tau, m[j], m[j + 1], 1.0 - bk, c0, c1);
        }
        return acc;
    }

    // R_k(tau) = -(1/Gamma(1-b_k)) sum_{i<k} Int_{window i} du_i(s) (tau-s)^(-b_k) ds
    double R_eval(int k, double tau) const {
        const double bk = sched.beta[k];
        if (bk == 1.0) return 0.0;
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += window_memory_integral(i, tau, bk);
        return -acc;
    }

    // Caputo part of the order-(1-b_k) derivative of R_k at tau, from the cache.
    double capu_interp(int k, double tau) const {
        const Window& w = win[k];
        LinearTable t;
        // linear interpolation on the stored grid without copying
        const auto& g = w.g;
        if (tau <= g.front()) return w.capu.front();
        if (tau >= g.back()) return w.capu.back();
        auto it = std::upper_bound(g.begin(), g.end(), tau);
        std::size_t i = it - g.begin();
        double s = (tau - g[i - 1]) / (g[i] - g[i - 1]);
        return w.capu[i - 1] + s * (w.capu[i] - w.capu[i - 1]);
    }

    // P_k(t) = Int_a^t prop_k(t-tau) [D^{1-b_k} R_k](tau) dtau, with the
    // derivative split into its continuous Caputo part (trapezoid against the
    // interpolated propagator) and the singular initial term
    // R_k(a) (tau-a)^(b_k-1) / Gamma(b_k) (exact left-weighted moments).
    double P_eval(int k, double t) const {
        const Window& w = win[k];
        const double bk = sched.beta[k];
        if (bk == 1.0) return 0.0;
        if (t <= w.a * (1.0 + 1e-15) + 1e-300) return 0.0;
        std::vector<double> mesh;
        mesh.reserve(w.g.size() + 12);
        for (double x : w.g) {
            if (x < t) mesh.push_back(x);
            else break;
        }
        refine_toward(&mesh, mesh.back(), t);

        double part_sing = 0.0, part_capu = 0.0;
        double p_prev = w.prop(t - mesh[0]);
        double c_prev = capu_interp(k, mesh[0]);
        for (std::size_t j = 0; j + 1 < mesh.size(); ++j) {
            double a = mesh[j], b = mesh[j + 1];
            double p_next = w.prop(t - b);
            double c_next = capu_interp(k, b);
            double c1 = (p_next - p_prev) / (b - a);
            double c0 = p_prev - c1 * a;
            part_sing += quad::weighted_linear_left(w.a, a, b, bk, c0, c1);
            part_capu += 0.5 * (b - a) * (p_prev * c_prev + p_next * c_next);
            p_prev = p_next;
            c_prev = c_next;
        }
        return part_capu + w.R_at_a * part_sing;
    }

    // d/ds of the window-k Duhamel correction:
    //   P'_k(s) = [D^{1-b}R](s) + lam b Int_a^s (s-tau)^(b-1) E'((s-tau)^b lam)
    //                                         [D^{1-b}R](tau) dtau
    double Pprime_eval(int k, double s) const {
        const Window& w = win[k];
        const double bk = sched.beta[k];
        if (bk == 1.0) return 0.0;
        double rld_s = capu_interp(k, s) + w.R_at_a * std::pow(s - w.a, bk - 1.0) /
                                               std::tgamma(bk);
        if (s <= w.a) return rld_s;
        std::vector<double> mesh;
        for (double x : w.g) {
            if (x < s) mesh.push_back(x);
            else break;
        }
        refine_toward(&mesh, mesh.back(), s);
        const double gamma_bk = std::tgamma(bk);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < mesh.size(); ++j) {
            double a = mesh[j], b = mesh[j + 1];
            double dmid = s - 0.5 * (a + b);
            double eprime = w.dprop(dmid);
            // Caputo part of RLD: linear between cached values
            double ca = capu_interp(k, a), cb = capu_interp(k, b);
            double c1 = (cb - ca) / (b - a);
            double c0 = ca - c1 * a;
            double raw_capu = quad::weighted_linear_right(s, a, b, bk, c0, c1) * gamma_bk;
            // singular part of RLD against the same kernel, cell-frozen kernel
            double raw_sing;
            if (a - w.a < s - b) {  // cell nearer the window start
                raw_sing = std::pow(s - 0.5 * (a + b), bk - 1.0) *
                           (std::pow(b - w.a, bk) - std::pow(a - w.a, bk)) / bk;
            } else {  // cell nearer the evaluation point
                raw_sing = std::pow(0.5 * (a + b) - w.a, bk - 1.0) *
                           (std::pow(s - a, bk) - std::pow(s - b, bk)) / bk;
            }
            acc += eprime * (raw_capu + w.R_at_a / gamma_bk * raw_sing);
        }
        return rld_s + lam * bk * acc;
    }

    void build() {
        const int nw = sched.num_windows();
        win.resize(nw);
        const int last_needed = sched.window(t_max);  // highest window the horizon reaches
        for (int k = 0; k < nw; ++k) {
            Window& w = win[k];
            w.beta = sched.beta[k];
            w.a = sched.t_cr[k];
            if (w.a > t_max) break;
            w.b = (k + 1 < nw) ? std::min(sched.t_cr[k + 1], t_max) : t_max;
            w.built = true;
            windows_built = k + 1;

            if (k >= 1) {
                w.c = prop_direct(k - 1, sched.t_cr[k] - sched.t_cr[k - 1]) * win[k - 1].c +
                      (k >= 2 ? P_eval(k - 1, sched.t_cr[k]) : 0.0);
                double len = w.b - w.a;
                if (len <= 1e-14 * (1.0 + w.a)) continue;  // horizon touches the window start
                w.prop = build_table(len, cfg.delta_nodes, cfg.grading,
                                     [&](double d) { return prop_direct(k, d); });
                w.g = quad::graded_mesh_both(w.a, w.b, cfg.cache_nodes, cfg.grading);
                w.Rv.resize(w.g.size());
                for (std::size_t r = 0; r < w.g.size(); ++r) w.Rv[r] = R_eval(k, w.g[r]);
                w.R_at_a = w.Rv.front();
                // Caputo part of D^{1-b} R on the cache grid (L1 on the grid)
                w.capu.assign(w.g.size(), 0.0);
                for (std::size_t r = 1; r < w.g.size(); ++r) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < r; ++j) {
                        double slope = (w.Rv[j + 1] - w.Rv[j]) / (w.g[j + 1] - w.g[j]);
                        acc += slope * quad::caputo_weight(w.g[r], w.g[j], w.g[j + 1],
                                                           1.0 - w.beta);
                    }
                    w.capu[r] = acc;
                }
                w.Pv.resize(w.g.size());
                for (std::size_t r = 0; r < w.g.size(); ++r) w.Pv[r] = P_eval(k, w.g[r]);
            }

            const bool feeds_later = (k < last_needed) && (k + 1 < nw);
            if (feeds_later) {
                double full_b = sched.t_cr[k + 1];  // <= t_max since k < last_needed
                double len = full_b - w.a;
                w.dprop = build_table(len, cfg.delta_nodes, cfg.grading,
                                      [&](double d) { return dprop_direct(k, d); });
                w.du_mesh = quad::graded_mesh_both(w.a, full_b, cfg.quad_nodes, cfg.grading);
                w.du.assign(w.du_mesh.size(), 0.0);
                w.H_at_a = (w.c * lam + w.R_at_a) / std::tgamma(w.beta);
                for (std::size_t i = 1; i < w.du_mesh.size(); ++i) {
                    double s = w.du_mesh[i];
                    double d = s - w.a;
                    double analytic =
                        (w.beta == 1.0)
                            ? w.c * lam * std::exp(lam * d)
                            : w.c * lam * w.beta * std::pow(d, w.beta - 1.0) * w.dprop(d);
                    double pprime = (k >= 1) ? Pprime_eval(k, s) : 0.0;
                    w.du[i] = analytic + pprime;
                }
                w.has_du = true;
            }
        }
        for (int k = 0; k < windows_built; ++k) {
            for (double v : win[k].Rv) check_finite(v, k);
            for (double v : win[k].Pv) check_finite(v, k);
            for (double v : win[k].du) check_finite(v, k);
        }
    }

    void check_finite(double v, int k) const {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "SymbolWorkspace: non-finite symbol cache (window " << k
               << ", lambda = " << lam << ")";
            throw std::runtime_error(os.str());
        }
    }

    double value(double t) const {
        if (t < 0.0 || t > t_max * (1.0 + 1e-12) + 1e-300)
            throw std::domain_error("SymbolWorkspace: time outside the built horizon");
        t = std::min(t, t_max);
        int k = sched.window(t);
        if (k == 0) return prop_direct(0, t);
        const Window& w = win[k];
        if (!w.built)
            throw std::logic_error("SymbolWorkspace: window not built");
        return prop_direct(k, t - w.a) * w.c + P_eval(k, t);
    }
};

SymbolWorkspace::SymbolWorkspace(CriticalSchedule sched, double lambda, double t_max,
                                 SpectralConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(sched), lambda, t_max, cfg)) {}
SymbolWorkspace::~SymbolWorkspace() = default;
SymbolWorkspace::SymbolWorkspace(SymbolWorkspace&&) noexcept = default;
SymbolWorkspace& SymbolWorkspace::operator=(SymbolWorkspace&&) noexcept = default;

double SymbolWorkspace::value(double t) const { return impl_->value(t); }

double SymbolWorkspace::S(int j, double t) const {
    const auto& s = impl_->sched;
    if (j < 0 || j >= s.num_windows()) throw std::domain_error("symbol S: bad mode index");
    if (t < s.t_cr[j]) throw std::domain_error("symbol S: requires t >= t_cr[j]");
    return impl_->prop_direct(j, t - s.t_cr[j]);
}

double SymbolWorkspace::M(int k, double t) const {
    const auto& s = impl_->sched;
    if (k < 1 || k >= s.num_windows()) throw std::domain_error("symbol M: bad mode index");
    if (t < s.t_cr[k]) throw std::domain_error("symbol M: requires t >= t_cr[k]");
    double v = impl_->prop_direct(k, t - s.t_cr[k]);
    for (int j = 0; j < k; ++j) v *= impl_->prop_direct(j, s.t_cr[j + 1] - s.t_cr[j]);
    return v;
}

double SymbolWorkspace::R(int k, double t) const {
    const auto& s = impl_->sched;
    if (k < 1 || k >= s.num_windows()) throw std::domain_error("symbol R: bad mode index");
    if (t < s.t_cr[k]) throw std::domain_error("symbol R: requires t >= t_cr[k]");
    return impl_->R_eval(k, t);
}

double SymbolWorkspace::P(int k, double t) const {
    const auto& s = impl_->sched;
    if (k < 0 || k >= s.num_windows()) throw std::domain_error("symbol P: bad mode index");
    if (k == 0) return 0.0;
    if (t < s.t_cr[k]) throw std::domain_error("symbol P: requires t >= t_cr[k]");
    return impl_->P_eval(k, std::min(t, impl_->win[k].b));
}

double SymbolWorkspace::window_start_value(int k) const {
    if (k < 0 || k >= impl_->windows_built)
        throw std::domain_error("window_start_value: window not built");
    return impl_->win[k].c;
}

double SymbolWorkspace::lambda() const { return impl_->lam; }
const CriticalSchedule& SymbolWorkspace::schedule() const { return impl_->sched; }

double symbol_S(int j, double t, double lambda, const CriticalSchedule& sched) {
    if (j < 0 || j >= sched.num_windows()) throw std::domain_error("symbol_S: bad mode index");
    if (t < sched.t_cr[j]) throw std::domain_error("symbol_S: requires t >= t_cr[j]");
    double b = sched.beta[j];
    double d = t - sched.t_cr[j];
    if (d <= 0.0) return 1.0;
    if (b == 1.0) return std::exp(lambda * d);
    return mlf_eval(b, std::pow(d, b) * lambda);
}

double symbol_M(int k, double t, double lambda, const CriticalSchedule& sched) {
    if (k < 1 || k >= sched.num_windows()) throw std::domain_error("symbol_M: bad mode index");
    double v = symbol_S(k, t, lambda, sched);
    for (int j = 0; j < k; ++j)
        v *= symbol_S(j, sched.t_cr[j + 1], lambda, sched);
    return v;
}

double symbol_R(int k, double t, double lambda, const CriticalSchedule& sched,
                const SpectralConfig& cfg) {
    SymbolWorkspace ws(sched, lambda, std::max(t, sched.t_cr.back()) + 1e-9, cfg);
    return ws.R(k, t);
}

// ---------------------------------------------------------------------------
// Assembled closed-form path (nu = 0)
// ---------------------------------------------------------------------------

SolutionSymbol::SolutionSymbol(const OrderFunction& of, const LHParams& lh, double t_max,
                               SpectralConfig cfg)
    : sched_(CriticalSchedule::from(of.canonical(), lh)), t_max_(t_max), cfg_(cfg) {
    lh.validate();
    if (lh.nu != 0.0)
        throw std::domain_error("SolutionSymbol: the closed-form representation requires "
                                "nu = 0; use the hybrid solver for nu != 0");
    cfg_.validate();
}

double SolutionSymbol::value(double t, double lambda) const {
    return values({t}, lambda)[0];
}

std::vector<double> SolutionSymbol::values(const std::vector<double>& times,
                                           double lambda) const {
    std::vector<double> out(times.size());
    if (sched_.num_windows() == 1 || lambda == 0.0) {
        for (std::size_t i = 0; i < times.size(); ++i)
            out[i] = symbol_S(0, times[i], lambda, sched_);
        return out;
    }
    SymbolWorkspace ws(sched_, lambda, t_max_, cfg_);
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = ws.value(times[i]);
    return out;
}

double assemble_solution_symbol(double t, double lambda, const OrderFunction& of,
                                const LHParams& lh, const SpectralConfig& cfg) {
    SolutionSymbol sym(of, lh, std::max(t, 1e-6) * (1.0 + 1e-12), cfg);
    return sym.value(t, lambda);
}

double reduce_early_window(const OrderFunction& of, const LHParams& lh) {
    lh.validate();
    OrderFunction c = of.canonical();
    if (c.breakpoints().empty()) return kInf;
    double T1 = c.breakpoints().front();
    double cand1 = lh.mu > 0.0 ? T1 / lh.mu : kInf;
    double cand2 = lh.mu + lh.nu > 0.0 ? T1 / (lh.mu + lh.nu) : kInf;
    return std::min(cand1, cand2);
}

LateWindowPlan reduce_late_window(const OrderFunction& of, const LHParams& lh) {
    lh.validate();
    OrderFunction c = of.canonical();
    if (c.breakpoints().empty())
        return {0.0, c.values().back()};  // constant order: already in the final mode
    if (lh.mu == 0.0 || lh.mu + lh.nu == 0.0)
        throw std::domain_error("reduce_late_window: mu = 0 or mu + nu = 0 gives long memory, "
                                "the influence of the old mode never expires");
    double TN = c.breakpoints().back();
    return {std::max(TN / lh.mu, TN / (lh.mu + lh.nu)), c.values().back()};
}

// ---------------------------------------------------------------------------
// Late-window Duhamel continuation from a stepped history
// ---------------------------------------------------------------------------

namespace {

// Constant-order Caputo derivative of a sampled history based at its start.
double caputo_of_history(const SampledFunction& g, double beta, double t) {
    double acc = 0.0;
    const auto& grid = g.grid();
    for (std::size_t i = 0; i + 1 < grid.size() && grid[i] < t; ++i) {
        double b = std::min(grid[i + 1], t);
        acc += g.slope(i) * quad::caputo_weight(t, grid[i], b, beta);
    }
    return acc;
}

class LateWindowEvaluator {
public:
    LateWindowEvaluator(const SampledFunction& history, double beta_N, double T_star,
                        double lambda, double t_max, const SpectralConfig& cfg)
        : beta_(beta_N), T_(T_star), lam_(lambda) {
        u_at_T_ = history.value(T_);
        double len = std::max(t_max - T_, 1e-12);
        prop_.x = quad::graded_mesh_both(0.0, len, cfg.delta_nodes, cfg.grading);
        for (double d : prop_.x)
            prop_.y.push_back(beta_ == 1.0 ? std::exp(lam_ * d)
                              : d == 0.0   ? 1.0
                                           : mlf_eval(beta_, std::pow(d, beta_) * lam_));
        if (beta_ == 1.0) return;  // forcing vanishes, pure exponential continuation
        g_ = quad::graded_mesh_both(T_, t_max, cfg.cache_nodes, cfg.grading);
        fs_.resize(g_.size());
        for (std::size_t r = 0; r < g_.size(); ++r) fs_[r] = fstar(history, g_[r]);
        f_at_T_ = fs_.front();
        capu_.assign(g_.size(), 0.0);
        for (std::size_t r = 1; r < g_.size(); ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                double slope = (fs_[j + 1] - fs_[j]) / (g_[j + 1] - g_[j]);
                acc += slope * quad::caputo_weight(g_[r], g_[j], g_[j + 1], 1.0 - beta_);
            }
            capu_[r] = acc;
        }
    }

    // f*(tau) = -(1/Gamma(1-beta_N)) Int_0^{T*} u'(s) (tau - s)^(-beta_N) ds
    double fstar(const SampledFunction& history, double tau) const {
        double acc = 0.0;
        const auto& grid = history.grid();
        for (std::size_t i = 0; i + 1 < grid.size() && grid[i] < T_; ++i) {
            double b = std::min(grid[i + 1], T_);
            acc += history.slope(i) * quad::caputo_weight(tau, grid[i], b, beta_);
        }
        return -acc;
    }

    double fstar_cached(double tau) const {
        if (g_.empty()) return 0.0;  // beta_N = 1: no forcing
        return interp(g_, fs_, tau);
    }

    double value(double t) const {
        if (t <= T_) return u_at_T_;
        double head = prop_(t - T_) * u_at_T_;
        if (beta_ == 1.0) return head;
        // Duhamel integral; same split as the window corrections
        std::vector<double> mesh;
        for (double x : g_) {
            if (x < t) mesh.push_back(x);
            else break;
        }
        refine_toward(&mesh, mesh.back(), t);
        double part_sing = 0.0, part_capu = 0.0;
        double p_prev = prop_(t - mesh[0]);
        double c_prev = interp(g_, capu_, mesh[0]);
        for (std::size_t j = 0; j + 1 < mesh.size(); ++j) {
            double a = mesh[j], b = mesh[j + 1];
            double p_next = prop_(t - b);
            double c_next = interp(g_, capu_, b);
            double c1 = (p_next - p_prev) / (b - a);
            double c0 = p_prev - c1 * a;
            part_sing += quad::weighted_linear_left(T_, a, b, beta_, c0, c1);
            part_capu += 0.5 * (b - a) * (p_prev * c_prev + p_next * c_next);
            p_prev = p_next;
            c_prev = c_next;
        }
        return head + part_capu + f_at_T_ * part_sing;
    }

    double lambda() const { return lam_; }
    double beta() const { return beta_; }

private:
    static double interp(const std::vector<double>& x, const std::vector<double>& y, double xx) {
        if (xx <= x.front()) return y.front();
        if (xx >= x.back()) return y.back();
        auto it = std::upper_bound(x.begin(), x.end(), xx);
        std::size_t i = it - x.begin();
        double w = (xx - x[i - 1]) / (x[i] - x[i - 1]);
        return y[i - 1] + w * (y[i] - y[i - 1]);
    }

    double beta_, T_, lam_;
    double u_at_T_ = 0.0, f_at_T_ = 0.0;
    LinearTable prop_;
    std::vector<double> g_, fs_, capu_;
};

}  // namespace

// ---------------------------------------------------------------------------
// HybridScalarSolver
// ---------------------------------------------------------------------------

struct HybridScalarSolver::Impl {
    OrderFunction of;
    LHParams lh;
    double lam, t_max;
    Config cfg;
    double t_star = kInf, T_star = kInf;
    double beta0, betaN;
    std::unique_ptr<SampledFunction> history;
    std::unique_ptr<LateWindowEvaluator> late;

    Impl(const OrderFunction& of_in, const LHParams& lh_in, double lambda, double horizon,
         Config config)
        : of(of_in.canonical()), lh(lh_in), lam(lambda), t_max(horizon), cfg(config) {
        lh.validate();
        if (lam > 0.0) throw std::domain_error("HybridScalarSolver: lambda must be <= 0");
        beta0 = of.values().front();
        betaN = of.values().back();
        t_star = reduce_early_window(of, lh);
        if (of.breakpoints().empty()) return;  // constant order, closed form everywhere
        bool late_ok = lh.mu != 0.0 && lh.mu + lh.nu != 0.0;
        T_star = late_ok ? reduce_late_window(of, lh).T_star : kInf;
        if (t_max <= t_star) return;  // closed form covers all requested times
        double t_hist = std::min(t_max, T_star);
        ScalarVOProblem p;
        p.lambda = lam;
        p.of = of;
        p.lh = lh;
        p.t_end = t_hist;
        p.base_step = cfg.oracle_step;
        p.grading_exponent = cfg.grading;
        history = std::make_unique<SampledFunction>(step_solve(p));
        if (t_max > T_star)
            late = std::make_unique<LateWindowEvaluator>(*history, betaN, T_star, lam, t_max,
                                                         cfg.spectral);
    }

    double closed0(double t) const {
        if (t <= 0.0) return 1.0;
        if (beta0 == 1.0) return std::exp(lam * t);
        return mlf_eval(beta0, std::pow(t, beta0) * lam);
    }

    double value(double t) const {
        if (t < 0.0 || t > t_max * (1.0 + 1e-12))
            throw std::domain_error("HybridScalarSolver: time outside the built horizon");
        if (t <= t_star || of.breakpoints().empty()) return closed0(t);
        if (t <= T_star) return history->value(t);
        return late->value(t);
    }

    double residual(double t) const {
        if (!(t > T_star))
            throw std::domain_error("late_equation_residual: requires t > T*");
        if (!late)
            throw std::logic_error("late_equation_residual: no late window built");
        // sample the hybrid solution on [T*, t], graded toward T*
        std::vector<double> grid = quad::graded_mesh_left(T_star, t, 256, 2.0);
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = value(grid[i]);
        SampledFunction u(std::move(grid), std::move(vals));
        double lhs = caputo_of_history(u, betaN, t);
        double rhs = lam * value(t) + late->fstar_cached(t);
        return std::abs(lhs - rhs);
    }
};

HybridScalarSolver::HybridScalarSolver(const OrderFunction& of, const LHParams& lh, double lambda,
                                       double t_max)
    : HybridScalarSolver(of, lh, lambda, t_max, Config{}) {}

HybridScalarSolver::HybridScalarSolver(const OrderFunction& of, const LHParams& lh, double lambda,
                                       double t_max, Config cfg)
    : impl_(std::make_unique<Impl>(of, lh, lambda, t_max, cfg)) {}
HybridScalarSolver::~HybridScalarSolver() = default;
HybridScalarSolver::HybridScalarSolver(HybridScalarSolver&&) noexcept = default;

double HybridScalarSolver::value(double t) const { return impl_->value(t); }
double HybridScalarSolver::t_star() const { return impl_->t_star; }
double HybridScalarSolver::T_star() const { return impl_->T_star; }
double HybridScalarSolver::late_equation_residual(double t) const { return impl_->residual(t); }

// ---------------------------------------------------------------------------
// Field synthesis
// ---------------------------------------------------------------------------

namespace {

// Fills u_hat slices by mapping eval over the distinct half of the frequency
// grid and mirroring (the symbol depends on xi through A(xi) = A(-xi)).
template <typename Eval>
void fill_symbol_slices(const SymbolSpec& sym, const SpatialGrid& grid,
                        const std::vector<double>& times, std::vector<FieldSlice>* slices,
                        Eval&& eval_at_lambda) {
    slices->resize(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
        (*slices)[s].time = times[s];
        (*slices)[s].u_hat.assign(grid.total_points(), 0.0);
    }
    const auto points = detail::half_spectrum(sym, grid);
    parallel_for(points.size(), [&](std::size_t idx) {
        const auto& p = points[idx];
        std::vector<double> v = eval_at_lambda(p.lambda, times);
        for (std::size_t s = 0; s < times.size(); ++s)
            for (int m = 0; m < p.num_targets; ++m) (*slices)[s].u_hat[p.targets[m]] = v[s];
    });
}

void finish_field(SpectralField* field, double tail_tolerance) {
    const SpatialGrid& grid = field->grid;
    const int M = grid.points;
    for (auto& slice : field->slices) {
        // normalization S(t, 0) = 1
        double center = slice.u_hat[field->zero_xi_index()];
        if (std::abs(center - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "field synthesis: u_hat(t, 0) = " << center << " violates the unit "
               << "normalization at t = " << slice.time;
            throw std::runtime_error(os.str());
        }
        double tail = 0.0;
        if (grid.dimension == 1) {
            tail = std::abs(slice.u_hat[0]);
        } else {
            for (int k = 0; k < M; ++k) {
                tail = std::max(tail, std::abs(slice.u_hat[k]));
                tail = std::max(tail, std::abs(slice.u_hat[static_cast<std::size_t>(k) * M]));
            }
        }
        field->max_boundary_tail = std::max(field->max_boundary_tail, tail);
        double resid = 0.0;
        slice.u = synthesize_field(grid, slice.u_hat, &resid);
        field->max_imag_residue = std::max(field->max_imag_residue, resid);
    }
    (void)tail_tolerance;
}

}  // namespace

SpectralField fundamental_solution(const SymbolSpec& sym, const OrderFunction& of,
                                   const LHParams& lh, const SpatialGrid& grid,
                                   const std::vector<double>& times, SpectralConfig cfg) {
    sym.validate();
    grid.validate();
    cfg.validate();
    if (sym.dimension != grid.dimension)
        throw std::invalid_argument("fundamental_solution: symbol/grid dimension mismatch");
    if (times.empty()) throw std::invalid_argument("fundamental_solution: no output times");
    if (lh.nu != 0.0)
        throw std::domain_error("fundamental_solution: closed form requires nu = 0; use "
                                "field_hybrid");
    double t_max = *std::max_element(times.begin(), times.end());
    SolutionSymbol sol(of, lh, t_max * (1.0 + 1e-12), cfg);

    SpectralField field;
    field.grid = grid;
    field.provenance = Provenance::kSpectral;
    fill_symbol_slices(sym, grid, times, &field.slices,
                       [&](double lam, const std::vector<double>& ts) {
                           return sol.values(ts, lam);
                       });
    finish_field(&field, cfg.tail_tolerance);
    return field;
}

SpectralField field_hybrid(const SymbolSpec& sym, const OrderFunction& of, const LHParams& lh,
                           const SpatialGrid& grid, const std::vector<double>& times,
                           HybridFieldConfig cfg) {
    sym.validate();
    grid.validate();
    if (sym.dimension != grid.dimension)
        throw std::invalid_argument("field_hybrid: symbol/grid dimension mismatch");
    if (times.empty()) throw std::invalid_argument("field_hybrid: no output times");
    lh.validate();
    double t_max = *std::max_element(times.begin(), times.end());

    SpectralField field;
    field.grid = grid;
    field.provenance = Provenance::kHybrid;
    HybridScalarSolver::Config scfg{cfg.oracle_step, cfg.grading, cfg.spectral};
    fill_symbol_slices(sym, grid, times, &field.slices,
                       [&](double lam, const std::vector<double>& ts) {
                           HybridScalarSolver solver(of, lh, lam, t_max * (1.0 + 1e-12), scfg);
                           std::vector<double> v(ts.size());
                           for (std::size_t i = 0; i < ts.size(); ++i)
                               v[i] = solver.value(ts[i]);
                           return v;
                       });
    finish_field(&field, cfg.spectral.tail_tolerance);
    return field;
}

}  // namespace vodiff
