#pragma once

namespace vodiff {

/** Parameters for Mittag-Leffler evaluation: order beta in (0,1] and the
 * relative accuracy the evaluator aims for on its supported range. */
struct MLParams {
    double beta;
    double target_rel_err = 1e-12;

    void validate() const;
};

/** E_beta(z) for real z and beta in (0,1].
 *
 * The evaluator switches between the power series (small |z|), the
 * Gorenflo-Loutchko-Luchko integral representation (mid-range negative z)
 * and the divergent asymptotic series with smallest-term truncation
 * (large negative z).  For beta = 1 the identity E_1(z) = exp(z) is used.
 *
 * Throws std::domain_error for beta outside (0,1], std::invalid_argument
 * for non-finite z, std::overflow_error when the result exceeds double
 * range (positive z with z^(1/beta) beyond ~700). */
double mlf_eval(double beta, double z);
double mlf_eval(const MLParams& p, double z);

/// dE_beta/dz, same regime split, relative error budget 10x mlf_eval's.
double mlf_deriv(double beta, double z);
double mlf_deriv(const MLParams& p, double z);

/** The product E_beta(-t) * Gamma(1-beta) * t, which tends to 1 as t grows
 * (leading asymptotic term of E_beta(-t) is 1/(Gamma(1-beta) t)).
 * Requires t >= 50 and beta in (0,1); beta = 1 is rejected (Gamma(0) pole). */
double mlf_asymptotic_check(double beta, double t);

namespace detail {
// 1/Gamma(x) for any real x; returns 0 at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);
// sin(pi*x) with exact zeros at integer x.
double sin_pi(double x);
}  // namespace detail

}  // namespace vodiff
