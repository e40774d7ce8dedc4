#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "vodiff/mittag_leffler.hpp"
#include "vodiff/quadrature.hpp"

using namespace vodiff;

namespace {

SampledFunction sample(double t0, double t1, int n, double (*f)(double)) {
    std::vector<double> g(n + 1), v(n + 1);
    for (int i = 0; i <= n; ++i) {
        g[i] = t0 + (t1 - t0) * i / n;
        v[i] = f(g[i]);
    }
    return SampledFunction(std::move(g), std::move(v));
}

// Grunwald-Letnikov discretization of the Riemann-Liouville derivative,
// independent reference for rl_deriv:
//   D^a g(t) ~ h^-a sum_j w_j g(t - j h),  w_0 = 1, w_j = w_{j-1} (j-1-a)/j
double gl_rl_deriv(double (*f)(double), double alpha, double t0, double t, int n) {
    double h = (t - t0) / n;
    double w = 1.0, acc = f(t);
    for (int j = 1; j <= n; ++j) {
        w *= (j - 1.0 - alpha) / j;
        acc += w * f(t - j * h);
    }
    return acc * std::pow(h, -alpha);
}

double id(double t) { return t; }
double sq(double t) { return t * t; }
double one(double) { return 1.0; }
double ml06(double t) { return mlf_eval(0.6, -std::pow(t, 0.6)); }

}  // namespace

TEST_CASE("variable-order Caputo on closed forms") {
    LHParams lh{1.0, 0.0};
    QuadratureSpec q;

    // derivative of a constant vanishes
    OrderFunction of({1.0}, {0.8, 0.4});
    SampledFunction c = sample(0.0, 2.0, 100, one);
    CHECK(vo_caputo(c, of, LHParams{0.5, 0.5}, 1.7, q) == doctest::Approx(0.0).epsilon(1e-14));

    // classical Caputo of the identity: t^(1-b)/Gamma(2-b); exact for
    // piecewise-linear data, any grid
    SampledFunction lin = sample(0.0, 2.0, 7, id);
    for (double beta : {0.3, 0.5, 0.9}) {
        OrderFunction ob = OrderFunction::constant(beta);
        for (double t : {0.4, 1.0, 1.9}) {
            double expected = std::pow(t, 1.0 - beta) / std::tgamma(2.0 - beta);
            CHECK(vo_caputo(lin, ob, lh, t, q) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    CHECK(vo_caputo(lin, OrderFunction::constant(0.5), lh, 1.0, q) ==
          doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
}

TEST_CASE("two-mode Caputo splits at the kernel breakpoint") {
    // f = tau, T = [1], beta = [0.8, 0.4], mu = nu = 0.5, t = 1.5; the kernel
    // switches order at tau0 = (1 - 0.75)/0.5 = 0.5, so
    //   ((1.5)^0.2 - 1^0.2)/(0.2 Gamma(0.2)) + (1^0.6 - 0)/(0.6 Gamma(0.6))
    OrderFunction of({1.0}, {0.8, 0.4});
    LHParams lh{0.5, 0.5};
    SampledFunction lin = sample(0.0, 2.0, 64, id);
    double expected = (std::pow(1.5, 0.2) - 1.0) / (0.2 * std::tgamma(0.2)) +
                      1.0 / (0.6 * std::tgamma(0.6));
    CHECK(expected == doctest::Approx(1.211175222971588).epsilon(1e-13));
    CHECK(vo_caputo(lin, of, lh, 1.5, QuadratureSpec{}) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("order-one pieces follow the degenerate convention") {
    QuadratureSpec q;
    SampledFunction lin = sample(0.0, 2.0, 10, id);
    // beta == 1 globally: the operator is d/dt
    CHECK(vo_caputo(lin, OrderFunction::constant(1.0), LHParams{1.0, 0.0}, 1.5, q) ==
          doctest::Approx(1.0).epsilon(1e-13));
    SampledFunction quad_f = sample(0.0, 2.0, 4000, sq);
    CHECK(vo_caputo(quad_f, OrderFunction::constant(1.0), LHParams{1.0, 0.0}, 1.5, q) ==
          doctest::Approx(3.0).epsilon(1e-3));  // slope of the last linear cell
}

TEST_CASE("variable-order integral on closed forms") {
    LHParams lh{1.0, 0.0};
    QuadratureSpec q;
    SampledFunction c = sample(0.0, 2.0, 50, one);
    for (double beta : {0.4, 0.7, 1.0}) {
        OrderFunction ob = OrderFunction::constant(beta);
        for (double t : {0.5, 1.0, 1.8}) {
            double expected = std::pow(t, beta) / std::tgamma(beta + 1.0);
            CHECK(vo_integral(c, ob, lh, t, q) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    // J^beta tau = Gamma(2)/Gamma(2+beta) t^(1+beta); exact for linear data
    SampledFunction lin = sample(0.0, 2.0, 50, id);
    CHECK(vo_integral(lin, OrderFunction::constant(0.5), lh, 1.0, q) ==
          doctest::Approx(1.0 / std::tgamma(2.5)).epsilon(1e-12));
}

TEST_CASE("power kernel integral") {
    LHParams lh{1.0, 0.0};
    QuadratureSpec q;
    SampledFunction c = sample(0.0, 2.0, 50, one);
    // J^{beta k} 1 = t^(beta k)/Gamma(beta k + 1)
    for (double beta : {0.5, 0.8}) {
        OrderFunction ob = OrderFunction::constant(beta);
        for (int k : {1, 2, 4}) {
            for (double t : {0.5, 1.5}) {
                double expected = std::pow(t, beta * k) / std::tgamma(beta * k + 1.0);
                CHECK(vo_integral_power(c, ob, lh, t, k, q) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
    // k beta = 2 at beta = 0.5, k = 4, t = 0.5: 0.25/Gamma(3) = 0.125
    CHECK(vo_integral_power(c, OrderFunction::constant(0.5), lh, 0.5, 4, q) ==
          doctest::Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(vo_integral_power(c, OrderFunction::constant(0.5), lh, 0.5, 0, q),
                    std::domain_error);
}

TEST_CASE("iterated-integral estimate never exceeds its bound") {
    // max_{0<=t<=T} |J^{beta(t) k} 1| <= psi(T)^k / Gamma(k beta_min + 1)
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    QuadratureSpec q;
    SampledFunction c = sample(0.0, 2.0, 40, one);
    for (int inst = 0; inst < 100; ++inst) {
        double T = 0.3 + 1.7 * unif(rng);
        int k = 1 + static_cast<int>(unif(rng) * 6.0);
        double b0 = 0.15 + 0.85 * unif(rng);
        double b1 = 0.15 + 0.85 * unif(rng);
        double Tbrk = T * (0.2 + 0.6 * unif(rng));
        OrderFunction of({Tbrk}, {b0, b1});
        double mu = unif(rng), nu = std::min(1.0 - mu, unif(rng));
        LHParams lh{mu, nu};
        double bmin = std::min(b0, b1);
        double bound = std::pow(psi_bound(T, bmin), k) / std::tgamma(k * bmin + 1.0);
        double worst = 0.0;
        for (int i = 1; i <= 60; ++i)
            worst = std::max(worst,
                             std::abs(vo_integral_power(c, of, lh, T * i / 60.0, k, q)));
        CHECK(worst <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("Riemann-Liouville derivative closed forms and GL oracle") {
    QuadratureSpec q;
    // constant: c (t-t0)^(-a)/Gamma(1-a)
    SampledFunction c = sample(0.5, 2.5, 50, one);
    for (double a : {0.3, 0.7}) {
        double t = 2.0, t0 = 0.5;
        double expected = std::pow(t - t0, -a) / std::tgamma(1.0 - a);
        CHECK(rl_deriv(c, a, t0, t, q) == doctest::Approx(expected).epsilon(1e-12));
    }
    // power rule: g = tau - t0, alpha = 0.5, t - t0 = 1 -> 1/Gamma(1.5)
    {
        std::vector<double> g(51), v(51);
        for (int i = 0; i <= 50; ++i) {
            g[i] = 0.5 + 2.0 * i / 50.0;
            v[i] = g[i] - 0.5;
        }
        SampledFunction lin(std::move(g), std::move(v));
        CHECK(rl_deriv(lin, 0.5, 0.5, 1.5, q) ==
              doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
    }
    // GL cross-check on a smooth nontrivial profile
    {
        SampledFunction g = sample(0.0, 1.0, 4000, ml06);
        double ours = rl_deriv(g, 0.4, 0.0, 1.0, q);
        double gl = gl_rl_deriv(ml06, 0.4, 0.0, 1.0, 4000);
        CHECK(std::abs(ours - gl) <= 5e-3 * std::abs(gl));  // both schemes are O(h)-ish here
    }
    // singular initial term flagged
    SampledFunction cc = sample(0.5, 2.5, 10, one);
    CHECK_THROWS_AS(rl_deriv(cc, 0.5, 0.5, 0.5, q), std::domain_error);
}

TEST_CASE("refinement order against a smooth closed form") {
    // Caputo of t^2 is 2 t^(2-b)/Gamma(3-b); sampling error of the L1 scheme
    // decays like h^(2-b)
    LHParams lh{1.0, 0.0};
    QuadratureSpec q;
    for (double beta : {0.5, 0.8}) {
        OrderFunction ob = OrderFunction::constant(beta);
        double t = 1.0;
        double expected = 2.0 * std::pow(t, 2.0 - beta) / std::tgamma(3.0 - beta);
        std::vector<double> errs;
        for (int n : {250, 500, 1000, 2000}) {
            SampledFunction f = sample(0.0, 1.25, n, sq);
            errs.push_back(std::abs(vo_caputo(f, ob, lh, t, q) - expected));
        }
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            double factor = errs[i] / errs[i + 1];
            CHECK(factor >= std::pow(2.0, 2.0 - beta) * 0.8);
        }
        // absolute accuracy at base_step 1e-3
        SampledFunction f = sample(0.0, 1.25, 1250, sq);
        CHECK(std::abs(vo_caputo(f, ob, lh, t, q) - expected) <= 1e-6);
    }
}

TEST_CASE("insertion of artificial breakpoints does not change results") {
    LHParams lh{0.5, 0.5};
    QuadratureSpec q;
    SampledFunction f = sample(0.0, 2.0, 64, sq);
    OrderFunction plain({1.0}, {0.8, 0.4});
    OrderFunction padded({0.4, 1.0, 1.3}, {0.8, 0.8, 0.4, 0.4});
    for (double t : {0.7, 1.3, 1.9}) {
        double a = vo_caputo(f, plain, lh, t, q);
        double b = vo_caputo(f, padded, lh, t, q);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        double ja = vo_integral(f, plain, lh, t, q);
        double jb = vo_integral(f, padded, lh, t, q);
        CHECK(std::abs(ja - jb) <= 1e-12 * std::max(1.0, std::abs(ja)));
    }
}

TEST_CASE("left inverse property on the first interval") {
    // For constant beta and f(0) = 0: J^b (D*^b f) = f, checked through the
    // sampled chain at quadrature tolerance.
    LHParams lh{1.0, 0.0};
    QuadratureSpec q;
    const double beta = 0.6;
    OrderFunction ob = OrderFunction::constant(beta);
    const int n = 800;
    std::vector<double> g(n + 1), v(n + 1);
    for (int i = 0; i <= n; ++i) {
        g[i] = 1.25 * i / n;
        v[i] = g[i] * g[i];  // f(0) = 0
    }
    SampledFunction f(g, v);
    // sample D*^b f on the same grid (value 0 at the origin)
    std::vector<double> dv(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) dv[i] = vo_caputo(f, ob, lh, g[i], q);
    SampledFunction df(g, dv);
    for (double t : {0.5, 1.0}) {
        double back = vo_integral(df, ob, lh, t, q);
        CHECK(back == doctest::Approx(t * t).epsilon(2e-4));
    }
}

TEST_CASE("input validation") {
    QuadratureSpec q;
    SampledFunction f = sample(0.0, 1.0, 10, id);
    OrderFunction ob = OrderFunction::constant(0.5);
    CHECK_THROWS_AS(vo_caputo(f, ob, LHParams{1.0, 0.0}, 2.0, q), std::domain_error);
    CHECK_THROWS_AS(vo_caputo(f, ob, LHParams{0.2, -0.5}, 0.5, q), std::domain_error);
    SampledFunction shifted = sample(0.5, 1.0, 10, id);
    CHECK_THROWS_AS(vo_caputo(shifted, ob, LHParams{1.0, 0.0}, 0.8, q), std::domain_error);
    CHECK_THROWS_AS(SampledFunction({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((QuadratureSpec{-1.0, 2.0}.validate()), std::domain_error);
}
