#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "vodiff/memory.hpp"
#include "vodiff/order_function.hpp"

using namespace vodiff;

TEST_CASE("order lookup uses right-open intervals") {
    OrderFunction of({1.0}, {0.8, 0.5});
    CHECK(of.at(0.5) == 0.8);
    CHECK(of.at(1.0) == 0.5);  // boundary belongs to the new mode
    CHECK(of.at(0.0) == 0.8);
    OrderFunction three({1.0, 3.0}, {0.9, 0.6, 0.3});
    CHECK(three.at(2.9) == 0.6);
    CHECK(three.at(3.0) == 0.3);
    CHECK(three.at(100.0) == 0.3);
    CHECK_THROWS_AS(of.at(-0.1), std::domain_error);
}

TEST_CASE("order function validation") {
    CHECK_THROWS_AS(OrderFunction({1.0, 1.0}, {0.5, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(OrderFunction({2.0, 1.0}, {0.5, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(OrderFunction({1.0}, {0.5, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(OrderFunction({1.0}, {0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(OrderFunction({-1.0}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(OrderFunction({1.0}, {0.5}), std::invalid_argument);
}

TEST_CASE("canonical form merges equal neighbours") {
    OrderFunction of({1.0, 2.0, 3.0}, {0.5, 0.5, 0.7, 0.7});
    OrderFunction c = of.canonical();
    CHECK(c.breakpoints().size() == 1);
    CHECK(c.breakpoints()[0] == 2.0);
    CHECK(c.values()[0] == 0.5);
    CHECK(c.values()[1] == 0.7);
    CHECK(OrderFunction({1.0}, {0.6, 0.6}).canonical().is_constant());
}

TEST_CASE("LH parallelogram membership") {
    CHECK(LHParams{1.0, 0.0}.admissible());
    CHECK(LHParams{0.5, 0.5}.admissible());
    CHECK(LHParams{0.0, 1.0}.admissible());
    CHECK(LHParams{1.0, -1.0}.admissible());
    CHECK(LHParams{0.5, -0.5}.admissible());
    CHECK_FALSE(LHParams{1.1, 0.0}.admissible());
    CHECK_FALSE(LHParams{0.5, 0.6}.admissible());   // mu+nu > 1
    CHECK_FALSE(LHParams{0.2, -0.3}.admissible());  // mu+nu < 0
    CHECK_THROWS_AS((LHParams{0.2, -0.3}.validate()), std::domain_error);
}

TEST_CASE("kernel evaluation") {
    // constant order 0.5: 1/(Gamma(0.5) (t-tau)^0.5) at t=2, tau=1 is 1/sqrt(pi)
    OrderFunction of = OrderFunction::constant(0.5);
    LHParams lh{1.0, 0.0};
    CHECK(kernel_eval(of, lh, 2.0, 1.0) ==
          doctest::Approx(0.5641895835477562869481).epsilon(1e-13));

    // order-1 piece degenerates
    OrderFunction one = OrderFunction::constant(1.0);
    CHECK(kernel_order_is_one(one, lh, 2.0, 1.0));
    CHECK_THROWS_AS(kernel_eval(one, lh, 2.0, 1.0), std::domain_error);

    // the active order comes from beta(mu t + nu tau)
    OrderFunction two({1.0}, {0.8, 0.4});
    LHParams half{0.5, 0.5};
    double t = 1.5, tau = 1.4;  // mu t + nu tau = 1.45 -> beta = 0.4
    double expected = 1.0 / (std::tgamma(0.6) * std::pow(t - tau, 0.4));
    CHECK(kernel_eval(two, half, t, tau) == doctest::Approx(expected).epsilon(1e-13));

    CHECK_THROWS_AS(kernel_eval(of, lh, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(kernel_eval(of, lh, 1.0, 2.0), std::domain_error);
}

TEST_CASE("kernel breakpoints") {
    OrderFunction of({1.0}, {0.8, 0.4});
    auto bp = kernel_breakpoints(of, LHParams{0.5, 0.25}, 1.5);
    REQUIRE(bp.size() == 1);
    CHECK(bp[0] == doctest::Approx(1.0).epsilon(1e-14));  // (1 - 0.75)/0.25

    CHECK(kernel_breakpoints(of, LHParams{1.0, 0.0}, 1.5).empty());

    auto neg = kernel_breakpoints(of, LHParams{0.8, -0.3}, 1.5);
    REQUIRE(neg.size() == 1);
    CHECK(neg[0] == doctest::Approx((1.0 - 1.2) / -0.3).epsilon(1e-14));

    // crossing outside (0, t) is dropped
    CHECK(kernel_breakpoints(of, LHParams{0.5, 0.25}, 0.5).empty());

    // breakpoints are exactly where the kernel order changes
    LHParams lh{0.5, 0.25};
    double t = 1.5, tau0 = bp[0];
    CHECK(of.at(lh.mu * t + lh.nu * (tau0 - 1e-9)) == 0.8);
    CHECK(of.at(lh.mu * t + lh.nu * (tau0 + 1e-9)) == 0.4);
}

TEST_CASE("memory classifier on the paper cases") {
    OrderFunction of({1.0}, {0.8, 0.5});

    auto weak = classify_memory(of, LHParams{0.5, 0.25});
    REQUIRE(weak.windows.size() == 1);
    CHECK(weak.windows[0].memory_class == MemoryClass::kShort);
    CHECK(weak.windows[0].t_low == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(weak.windows[0].t_high == doctest::Approx(2.0).epsilon(1e-14));

    auto longmem = classify_memory(of, LHParams{0.0, 1.0});
    CHECK(longmem.windows[0].memory_class == MemoryClass::kLong);
    CHECK(std::isinf(longmem.windows[0].t_high));

    OrderFunction of5({5.0}, {0.8, 0.5});
    auto none = classify_memory(of5, LHParams{1.0, 0.0});
    CHECK(none.windows[0].memory_class == MemoryClass::kNone);
    CHECK(none.windows[0].t_low == 5.0);
    CHECK(none.windows[0].t_high == 5.0);
    CHECK_FALSE(none.windows[0].has_mixing());

    auto strong = classify_memory(of, LHParams{0.8, -0.3});
    CHECK(strong.windows[0].memory_class == MemoryClass::kShort);
    CHECK(strong.windows[0].t_low == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(strong.windows[0].t_high == doctest::Approx(2.0).epsilon(1e-14));

    // nu = 0, mu < 1: short with an empty mixing window
    auto nz = classify_memory(of, LHParams{0.5, 0.0});
    CHECK(nz.windows[0].memory_class == MemoryClass::kShort);
    CHECK(nz.windows[0].t_low == nz.windows[0].t_high);

    // mu + nu = 0 is the other long-memory line
    auto lm2 = classify_memory(of, LHParams{0.5, -0.5});
    CHECK(lm2.windows[0].memory_class == MemoryClass::kLong);

    CHECK_THROWS_AS(classify_memory(of, LHParams{0.0, 0.0}), std::domain_error);
}

TEST_CASE("classifier windows agree with direct kernel-order sampling") {
    // For t inside the pure-old window every tau gives the old beta, inside
    // the pure-new window the new beta, and inside the mixing window both.
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        double mu = unif(rng);
        double nu = -1.0 + 2.0 * unif(rng);
        if (!LHParams{mu, nu}.admissible()) continue;
        if (mu == 0.0 && nu == 0.0) continue;
        double T = 0.2 + 3.0 * unif(rng);
        OrderFunction of({T}, {0.75, 0.35});
        LHParams lh{mu, nu};
        const auto w = classify_memory(of, lh).windows[0];
        auto order_seen = [&](double t) {
            bool old_seen = false, new_seen = false;
            auto probe = [&](double tau) {
                double b = of.at(mu * t + nu * tau);
                old_seen |= b == 0.75;
                new_seen |= b == 0.35;
            };
            for (int i = 1; i <= 200; ++i) probe(t * (i - 0.5) / 200);
            // the minority mode can be a sliver at either endpoint
            for (int i = 1; i <= 40; ++i) {
                probe(t * std::pow(0.5, i));
                probe(t * (1.0 - std::pow(0.5, i)));
            }
            return std::make_pair(old_seen, new_seen);
        };
        // pure old: sample a few t strictly below t_low
        for (double f : {0.3, 0.7, 0.97}) {
            double t = w.t_low * f;
            if (t <= 0.0) continue;
            auto [o, n] = order_seen(t);
            CHECK(o);
            CHECK_FALSE(n);
        }
        // pure new: above t_high (finite case)
        if (std::isfinite(w.t_high)) {
            for (double f : {1.03, 2.0, 8.0}) {
                auto [o, n] = order_seen(w.t_high * f);
                CHECK_FALSE(o);
                CHECK(n);
            }
        }
        // mixing: both orders occur
        if (w.has_mixing() && std::isfinite(w.t_high)) {
            double t = 0.5 * (w.t_low + w.t_high);
            auto [o, n] = order_seen(t);
            CHECK(o);
            CHECK(n);
        }
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("classifier is scale covariant") {
    for (double c : {0.1, 2.0, 37.5}) {
        OrderFunction a({1.0}, {0.8, 0.5});
        OrderFunction b({c}, {0.8, 0.5});
        LHParams lh{0.5, 0.25};
        auto wa = classify_memory(a, lh).windows[0];
        auto wb = classify_memory(b, lh).windows[0];
        CHECK(wb.t_low == doctest::Approx(c * wa.t_low).epsilon(1e-12));
        CHECK(wb.t_high == doctest::Approx(c * wa.t_high).epsilon(1e-12));
    }
}
