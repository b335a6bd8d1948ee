#pragma once

#include <cmath>

#include "bgamma/errors.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/constants.hpp"

namespace bgamma::specfun {

/// Exponential integral E1(x) = int_1^inf e^{-xt}/t dt for x > 0.
///
/// For x <= 1 the alternating power series
///   E1(x) = -gamma - ln x - sum_{n>=1} (-1)^n x^n / (n n!)
/// is summed directly; above that the Lentz continued fraction is used,
/// which converges fast exactly where the series starts to cancel.
inline double exp_integral_e1(double x, const EvalPolicy& policy = {}) {
    if (!(x > 0.0) || std::isnan(x))
        throw DomainError("exp_integral_e1: argument must be positive");
    if (std::isinf(x)) return 0.0;

    if (x <= 1.0) {
        double sum = 0.0;
        double power_over_fact = 1.0;  // x^n / n!
        for (long n = 1; n <= policy.max_terms(); ++n) {
            power_over_fact *= -x / static_cast<double>(n);
            const double term = power_over_fact / static_cast<double>(n);
            sum += term;
            if (std::abs(term) <= 0.1 * policy.rel_tol() * std::abs(sum))
                return -euler_gamma - std::log(x) - sum;
        }
        throw EvaluationError("exp_integral_e1: series did not converge", sum);
    }

    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i <= policy.max_terms(); ++i) {
        const double an = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= 0.1 * policy.rel_tol())
            return h * std::exp(-x);
    }
    throw EvaluationError("exp_integral_e1: continued fraction did not converge", h);
}

}  // namespace bgamma::specfun
