#include "vodiff/order_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vodiff {

OrderFunction::OrderFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breakpoints_.size() + 1)
        throw std::invalid_argument("OrderFunction: need exactly one more value than breakpoints");
    double prev = 0.0;
    for (double T : breakpoints_) {
        if (!(T > prev))
            throw std::invalid_argument("OrderFunction: breakpoints must be strictly increasing "
                                        "and positive");
        prev = T;
    }
    for (double b : values_) {
        if (!(b > 0.0) || b > 1.0)
            throw std::invalid_argument("OrderFunction: order values must lie in (0,1], got " +
                                        std::to_string(b));
    }
}

int OrderFunction::piece_index(double s) const {
    if (s < 0.0) throw std::domain_error("OrderFunction: negative argument");
    // first breakpoint > s; right-open intervals [T_k, T_{k+1})
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    return static_cast<int>(it - breakpoints_.begin());
}

double OrderFunction::at(double s) const { return values_[piece_index(s)]; }

double OrderFunction::min_order() const { return *std::min_element(values_.begin(), values_.end()); }

double OrderFunction::max_order() const { return *std::max_element(values_.begin(), values_.end()); }

OrderFunction OrderFunction::canonical() const {
    std::vector<double> bp, vals;
    vals.push_back(values_[0]);
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (values_[k + 1] != vals.back()) {
            bp.push_back(breakpoints_[k]);
            vals.push_back(values_[k + 1]);
        }
    }
    return OrderFunction(std::move(bp), std::move(vals));
}

bool LHParams::admissible() const {
    return mu >= 0.0 && mu <= 1.0 && nu >= -1.0 && nu <= 1.0 && mu + nu >= 0.0 && mu + nu <= 1.0;
}

void LHParams::validate() const {
    if (!admissible())
        throw std::domain_error("LHParams: (mu, nu) = (" + std::to_string(mu) + ", " +
                                std::to_string(nu) + ") outside the causality parallelogram");
}

bool kernel_order_is_one(const OrderFunction& of, const LHParams& lh, double t, double tau) {
    return of.at(lh.mu * t + lh.nu * tau) == 1.0;
}

double kernel_eval(const OrderFunction& of, const LHParams& lh, double t, double tau) {
    lh.validate();
    if (!(tau >= 0.0) || !(tau < t))
        throw std::domain_error("kernel_eval: requires 0 <= tau < t");
    double s = lh.mu * t + lh.nu * tau;
    // cannot be negative for (mu,nu) in the parallelogram and 0 <= tau < t
    if (s < 0.0) throw std::logic_error("kernel_eval: mu t + nu tau < 0");
    double beta = of.at(s);
    if (beta == 1.0)
        throw std::domain_error("kernel_eval: order 1 piece, kernel degenerates to d/dt "
                                "(Dirac at tau = t); handled by quadrature special case");
    return 1.0 / (std::tgamma(1.0 - beta) * std::pow(t - tau, beta));
}

std::vector<double> kernel_breakpoints(const OrderFunction& of, const LHParams& lh, double t) {
    lh.validate();
    if (!(t > 0.0)) throw std::domain_error("kernel_breakpoints: requires t > 0");
    std::vector<double> out;
    if (lh.nu == 0.0) return out;
    for (double T : of.breakpoints()) {
        double tau = (T - lh.mu * t) / lh.nu;
        if (tau > 0.0 && tau < t) out.push_back(tau);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace vodiff
