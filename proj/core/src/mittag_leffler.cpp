#include "vodiff/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vodiff {

namespace {

constexpr double kPi = 3.14159265358979323846;
// exp() overflows slightly above this; used as the documented range bound.
constexpr double kMaxExpArg = 700.0;

void require_order(double beta) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::domain_error("mittag_leffler: order beta must be in (0,1], got " +
                                std::to_string(beta));
}

void require_finite(double z) {
    if (!std::isfinite(z))
        throw std::invalid_argument("mittag_leffler: argument must be finite");
}

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// Largest log-magnitude of a series term, n ln|z| - lgamma(beta n + 1).
// The maximiser satisfies beta*psi(beta n + 1) = ln|z|, i.e. beta*n ~ |z|^(1/beta).
double series_peak_log(double beta, double az) {
    if (az <= 1.0) return 0.0;
    double n_star = std::pow(az, 1.0 / beta) / beta;
    double peak = 0.0;
    for (double n : {n_star, 0.5 * n_star, 1.5 * n_star, 2.0}) {
        if (n < 1.0) continue;
        peak = std::max(peak, n * std::log(az) - std::lgamma(beta * n + 1.0));
    }
    return peak;
}

// Power series sum_{n>=0} z^n / Gamma(beta n + 1).  Safe for z >= 0 always
// (monotone terms) and for z < 0 only when cancellation is mild; the caller
// gates on series_peak_log.
double series_eval(double beta, double z) {
    KahanSum sum;
    sum.add(1.0);
    double term = 1.0;
    for (int n = 1; n < 100000; ++n) {
        // term = z^n / Gamma(beta n + 1) via the ratio of consecutive terms
        double lg_ratio = std::lgamma(beta * n + 1.0) - std::lgamma(beta * (n - 1) + 1.0);
        term *= z * std::exp(-lg_ratio);
        sum.add(term);
        if (std::abs(term) < 1e-17 * (std::abs(sum.value()) + 1e-300) && n * beta > std::abs(z))
            return sum.value();
        if (!std::isfinite(term))
            throw std::overflow_error("mittag_leffler: series overflow");
    }
    return sum.value();
}

double series_deriv(double beta, double z) {
    // sum_{n>=1} n z^(n-1) / Gamma(beta n + 1)
    KahanSum sum;
    double zpow = 1.0;  // z^(n-1)
    double lg_prev = std::lgamma(beta + 1.0);
    sum.add(std::exp(-lg_prev));
    for (int n = 2; n < 100000; ++n) {
        zpow *= z;
        double lg = std::lgamma(beta * n + 1.0);
        double term = n * zpow * std::exp(-lg);
        sum.add(term);
        if (std::abs(term) < 1e-17 * (std::abs(sum.value()) + 1e-300) && n * beta > std::abs(z) + 1)
            break;
        if (!std::isfinite(term))
            throw std::overflow_error("mittag_leffler: series overflow");
    }
    return sum.value();
}

// Asymptotic expansion for z = -t, t large:
//   E_beta(-t)  ~  sum_{k>=1} (-1)^(k+1) t^(-k) / Gamma(1 - beta k)
//   E'_beta(-t) ~  sum_{k>=1} (-1)^(k+1) k t^(-k-1) / Gamma(1 - beta k)
// Terms are computed in log space via the reflection formula; the series is
// truncated at the smallest term.  Returns false if the target accuracy is
// not reachable before the terms start growing.
bool asymptotic_eval(double beta, double t, bool deriv, double rel_tol, double* out) {
    const double log_t = std::log(t);
    double sum = 0.0, prev_mag = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 1; k <= 300; ++k) {
        // 1/Gamma(1 - beta k) = sin(pi beta k) Gamma(beta k) / pi
        double s = detail::sin_pi(beta * k);
        double mag_log = -k * log_t + std::lgamma(beta * k) + std::log(std::abs(s) + 1e-320) -
                         std::log(kPi);
        if (deriv) mag_log += std::log(static_cast<double>(k)) - log_t;
        if (s == 0.0) continue;  // vanishing term (beta k integer), keep going
        double mag = std::exp(mag_log);
        if (mag >= prev_mag) {
            // terms started to grow: stop at the smallest term
            converged = prev_mag <= rel_tol * std::abs(sum);
            break;
        }
        double sign = (k % 2 == 1 ? 1.0 : -1.0) * (s > 0 ? 1.0 : -1.0);
        sum += sign * mag;
        prev_mag = mag;
        if (mag <= rel_tol * std::abs(sum)) {
            converged = true;
            break;
        }
    }
    *out = sum;
    return converged && std::isfinite(sum);
}

// Gorenflo-Loutchko-Luchko integral representation on the negative axis,
// after the substitution r = r0 + w tan(theta) that flattens the Lorentzian
// factor (r0 = -t cos(beta pi), w = t sin(beta pi)):
//   E_beta(-t)  = 1/(pi beta) Int_{th0}^{pi/2} exp(-r(th)^(1/beta)) dth
//   E'_beta(-t) = sin(beta pi)/(pi beta w^3)
//                 Int (t^2 - r^2) cos^2(th) exp(-r(th)^(1/beta)) dth
// The integrand is smooth; adaptive Gauss-Legendre handles it.
struct GllIntegrand {
    double beta, t, r0, w, inv_beta;
    bool deriv;
    double operator()(double th) const {
        double r = r0 + w * std::tan(th);
        if (r < 0) r = 0;
        double e = std::exp(-std::pow(r, inv_beta));
        if (!deriv) return e;
        double c = std::cos(th);
        return (t * t - r * r) * c * c * e;
    }
};

template <typename F>
double gauss15(const F& f, double a, double b) {
    // 15-point Gauss-Legendre nodes/weights on [-1,1]
    static const double x[8] = {0.0,
                                0.2011940939974345,
                                0.3941513470775634,
                                0.5709721726085388,
                                0.7244177313601700,
                                0.8482065834104272,
                                0.9372733924007059,
                                0.9879925180204854};
    static const double wgt[8] = {0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
                                  0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
                                  0.0703660474881081, 0.0307532419961173};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = wgt[0] * f(mid);
    for (int i = 1; i < 8; ++i)
        s += wgt[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
    return s * half;
}

template <typename F>
void adaptive_gauss(const F& f, double a, double b, double whole, double tol, int depth,
                    double* acc) {
    double mid = 0.5 * (a + b);
    double left = gauss15(f, a, mid), right = gauss15(f, mid, b);
    if (depth > 24 || std::abs(left + right - whole) <= tol) {
        *acc += left + right;
        return;
    }
    adaptive_gauss(f, a, mid, left, 0.5 * tol, depth + 1, acc);
    adaptive_gauss(f, mid, b, right, 0.5 * tol, depth + 1, acc);
}

double integral_eval(double beta, double t, bool deriv) {
    GllIntegrand f;
    f.beta = beta;
    f.t = t;
    f.r0 = -t * std::cos(beta * kPi);
    f.w = t * std::sin(beta * kPi);
    f.inv_beta = 1.0 / beta;
    f.deriv = deriv;
    double th0 = std::atan(-f.r0 / f.w);
    // cut where exp(-r^(1/beta)) < 1e-22
    double r_max = std::pow(50.0, beta);
    double th1 = (r_max > f.r0) ? std::atan((r_max - f.r0) / f.w) : th0 + 1e-8;
    if (th1 <= th0) th1 = 0.5 * (th0 + kPi / 2);
    double whole = gauss15(f, th0, th1);
    double acc = 0.0;
    adaptive_gauss(f, th0, th1, whole, 1e-15 * (std::abs(whole) + 1e-30), 0, &acc);
    if (!deriv) return acc / (kPi * beta);
    return acc * std::sin(beta * kPi) / (kPi * beta * f.w * f.w * f.w);
}

double eval_impl(double beta, double z, bool deriv, double rel_tol) {
    require_order(beta);
    require_finite(z);
    if (beta == 1.0) {
        if (z > kMaxExpArg) throw std::overflow_error("mittag_leffler: exp overflow at beta=1");
        return std::exp(z);
    }
    if (z == 0.0) return deriv ? detail::reciprocal_gamma(beta + 1.0) : 1.0;
    if (z > 0.0) {
        if (std::log(z) / beta > std::log(kMaxExpArg))
            throw std::overflow_error(
                "mittag_leffler: argument beyond representable range (z^(1/beta) too large)");
        return deriv ? series_deriv(beta, z) : series_eval(beta, z);
    }
    const double t = -z;
    // Series while cancellation stays below ~1e2 (keeps the error near eps).
    if (series_peak_log(beta, t) < std::log(100.0))
        return deriv ? series_deriv(beta, z) : series_eval(beta, z);
    if (t >= 15.0) {
        double v;
        if (asymptotic_eval(beta, t, deriv, 0.1 * rel_tol, &v)) return v;
    }
    return integral_eval(beta, t, deriv);
}

}  // namespace

namespace detail {

double sin_pi(double x) {
    double r = std::remainder(x, 2.0);  // r in [-1, 1]
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    return std::sin(kPi * r);
}

double reciprocal_gamma(double x) {
    if (x > 0.5) {
        if (x > 171.0) return std::exp(-std::lgamma(x));
        return 1.0 / std::tgamma(x);
    }
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    double s = sin_pi(x);
    if (s == 0.0) return 0.0;  // poles of Gamma
    double lg = std::lgamma(1.0 - x);
    if (lg > kMaxExpArg) return (s > 0 ? 1.0 : -1.0) * std::numeric_limits<double>::infinity();
    return s * std::exp(lg) / kPi;
}

}  // namespace detail

void MLParams::validate() const {
    require_order(beta);
    if (!(target_rel_err > 0.0))
        throw std::domain_error("MLParams: target_rel_err must be positive");
}

double mlf_eval(double beta, double z) { return eval_impl(beta, z, false, 1e-12); }

double mlf_eval(const MLParams& p, double z) {
    p.validate();
    return eval_impl(p.beta, z, false, p.target_rel_err);
}

double mlf_deriv(double beta, double z) { return eval_impl(beta, z, true, 1e-11); }

double mlf_deriv(const MLParams& p, double z) {
    p.validate();
    return eval_impl(p.beta, z, true, 10.0 * p.target_rel_err);
}

double mlf_asymptotic_check(double beta, double t) {
    if (!(beta > 0.0) || beta >= 1.0)
        throw std::domain_error("mlf_asymptotic_check: beta must be in (0,1); Gamma(1-beta) "
                                "has a pole at beta=1");
    if (!(t >= 50.0))
        throw std::domain_error("mlf_asymptotic_check: requires t >= 50");
    return mlf_eval(beta, -t) * std::tgamma(1.0 - beta) * t;
}

}  // namespace vodiff
