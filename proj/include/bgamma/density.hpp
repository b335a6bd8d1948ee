#pragma once

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/bessel.hpp"
#include "bgamma/specfun/constants.hpp"
#include "bgamma/specfun/gamma.hpp"
#include "bgamma/specfun/hypergeometric.hpp"
#include "bgamma/specfun/quadrature.hpp"

namespace bgamma {

/// Closed form used to evaluate the density on one half-line.
enum class DensityBranch { IntegerShape, EqualAlphaBessel, WhittakerGeneral, QuadratureFallback };

inline std::string_view to_string(DensityBranch b) {
    switch (b) {
        case DensityBranch::IntegerShape: return "IntegerShape";
        case DensityBranch::EqualAlphaBessel: return "EqualAlphaBessel";
        case DensityBranch::WhittakerGeneral: return "WhittakerGeneral";
        case DensityBranch::QuadratureFallback: return "QuadratureFallback";
    }
    return "?";
}

namespace detail {

inline void require_positive_x(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError(std::string(name) + ": x must be positive and finite");
}

// ln of lambda+^a+ lambda-^a- / ((lambda+ + lambda-)^a- Gamma(a+)), shared by
// the convolution, integer-shape and Whittaker forms.
inline double log_positive_prefactor(const BgParams& p) {
    return p.alpha_plus() * std::log(p.lambda_plus()) +
           p.alpha_minus() * std::log(p.lambda_minus()) -
           p.alpha_minus() * std::log(p.rate_sum()) - specfun::ln_gamma(p.alpha_plus());
}

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace detail

/// Branch used for x > 0 (x < 0 is evaluated on the reflected parameters).
inline DensityBranch select_branch(const BgParams& p) {
    if (detail::as_positive_integer(p.alpha_plus()) > 0) return DensityBranch::IntegerShape;
    if (std::abs(p.alpha_plus() - p.alpha_minus()) <= detail::integer_tolerance)
        return DensityBranch::EqualAlphaBessel;
    return DensityBranch::WhittakerGeneral;
}

inline DensityBranch select_branch(const BgParams& p, double x) {
    return x < 0.0 ? select_branch(p.reflected()) : select_branch(p);
}

/// ln f(x), x > 0, for integer alpha+ = n: the finite sum
///   f(x) = C (sum_k a_k x^k) e^{-lambda+ x},
///   a_k = binom(n-1,k) (lambda+ + lambda-)^{-(n-1-k)} prod_{l=0}^{n-2-k} (alpha- + l).
/// Summed in log space so large n and large rates stay finite.
inline double log_pdf_integer_shape(const BgParams& p, double x) {
    detail::require_positive_x(x, "pdf_integer_shape");
    const long n = detail::as_positive_integer(p.alpha_plus());
    if (n == 0) throw ContractError("pdf_integer_shape: alpha_plus must be a positive integer");
    const double am = p.alpha_minus();
    const double log_rate_sum = std::log(p.rate_sum());
    const double log_x = std::log(x);

    // prod_{l=0}^{m-1} (am + l) for m = 0..n-1, in log form.
    std::vector<double> log_rising(static_cast<std::size_t>(n), 0.0);
    for (long m = 1; m < n; ++m)
        log_rising[static_cast<std::size_t>(m)] =
            log_rising[static_cast<std::size_t>(m - 1)] + std::log(am + static_cast<double>(m - 1));

    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        const long m = n - 1 - k;
        const double log_binom = specfun::ln_gamma(static_cast<double>(n)) -
                                 specfun::ln_gamma(static_cast<double>(k + 1)) -
                                 specfun::ln_gamma(static_cast<double>(m + 1));
        log_terms.push_back(log_binom - static_cast<double>(m) * log_rate_sum +
                            log_rising[static_cast<std::size_t>(m)] + static_cast<double>(k) * log_x);
    }
    const double log_c = static_cast<double>(n) * std::log(p.lambda_plus()) +
                         am * std::log(p.lambda_minus()) - am * log_rate_sum -
                         specfun::ln_gamma(static_cast<double>(n));
    return log_c + detail::log_sum_exp(log_terms) - p.lambda_plus() * x;
}

inline double pdf_integer_shape(const BgParams& p, double x) {
    return std::exp(log_pdf_integer_shape(p, x));
}

/// ln f(x), x != 0, when alpha+ = alpha- = alpha (Variance Gamma case):
///   f(x) = (1/Gamma(alpha)) (l+ l-/(l+ + l-))^alpha |x|^{alpha-1}
///          e^{-x (l+ - l-)/2} sqrt(|x| (l+ + l-)/pi) K_{alpha-1/2}(|x| (l+ + l-)/2).
inline double log_pdf_equal_alpha(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    if (x == 0.0 || !std::isfinite(x))
        throw DomainError("pdf_equal_alpha: x must be nonzero and finite");
    if (std::abs(p.alpha_plus() - p.alpha_minus()) > detail::integer_tolerance)
        throw ContractError("pdf_equal_alpha: requires alpha_plus == alpha_minus");
    const double alpha = p.alpha_plus();
    const double ls = p.rate_sum();
    const double ax = std::abs(x);
    const double y = 0.5 * ax * ls;
    const double log_k = std::log(specfun::bessel_k_scaled(alpha - 0.5, y, policy)) - y;
    return -specfun::ln_gamma(alpha) +
           alpha * std::log(p.lambda_plus() * p.lambda_minus() / ls) +
           (alpha - 1.0) * std::log(ax) - 0.5 * x * (p.lambda_plus() - p.lambda_minus()) +
           0.5 * std::log(ax * ls / specfun::pi) + log_k;
}

inline double pdf_equal_alpha(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    return std::exp(log_pdf_equal_alpha(p, x, policy));
}

/// ln f(x), x > 0, through the Whittaker function:
///   f(x) = l+^a+ l-^a- / ((l+ + l-)^{(a+ + a-)/2} Gamma(a+)) x^{(a+ + a-)/2 - 1}
///          e^{-x (l+ - l-)/2} W_{(a+ - a-)/2, (a+ + a- - 1)/2}(x (l+ + l-)).
inline double log_pdf_whittaker(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    detail::require_positive_x(x, "pdf_whittaker");
    const double ap = p.alpha_plus();
    const double am = p.alpha_minus();
    const double ls = p.rate_sum();
    const double half_sum = 0.5 * (ap + am);
    const double w_lambda = 0.5 * (ap - am);
    const double w_mu = 0.5 * (ap + am - 1.0);
    const double z = x * ls;
    const double log_w = w_lambda * std::log(z) - 0.5 * z +
                         std::log(specfun::whittaker_w_scaled(w_lambda, w_mu, z, policy));
    return ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus()) -
           half_sum * std::log(ls) - specfun::ln_gamma(ap) + (half_sum - 1.0) * std::log(x) -
           0.5 * x * (p.lambda_plus() - p.lambda_minus()) + log_w;
}

inline double pdf_whittaker(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    return std::exp(log_pdf_whittaker(p, x, policy));
}

/// ln f(x), x > 0, by integrating the convolution of the two Gamma densities
///   f(x) = int_0^inf g+(x + y) g-(y) dy
/// directly in y. Used when a closed-form branch fails to converge.
inline double log_pdf_quadrature(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    detail::require_positive_x(x, "pdf_quadrature");
    const double ap = p.alpha_plus();
    const double am = p.alpha_minus();
    const double lp = p.lambda_plus();
    const double lm = p.lambda_minus();
    const double ls = p.rate_sum();
    const double s = ap + am;
    const double rel = std::max(policy.rel_tol(), 1e-15);
    const long max_segments = std::max(200L, 4 * policy.max_terms());
    const double c = 1.0 / ls;
    const double log_x = std::log(x);

    // ln of (x + y)^{a+ - 1} y^{a- - 1} e^{-(l+ + l-) y}, and a reference
    // level so every piece is summed as O(1) numbers.
    // ln(x + y) from the logs, since x + y loses digits for subnormal x.
    auto log_kernel = [&](double y, double log_y) {
        const double log_xy = std::max(log_x, log_y) + std::log1p(std::exp(-std::abs(log_x - log_y)));
        return (ap - 1.0) * log_xy + (am - 1.0) * log_y - ls * y;
    };
    const double log_ref = (s - 1.0) * (s < 1.0 ? std::min(log_x, std::log(c)) : std::max(log_x, std::log(c)));

    double total = 0.0;
    bool ok = true;
    auto add = [&](const specfun::QuadratureResult& r) {
        total += r.value;
        ok = ok && r.converged;
    };

    // [0, x] in y = x u, u = w^{1/a-}: x^{s-1} int_0^1 (1 + u)^{a+ - 1} e^{-ls x u} dw / a-.
    {
        const double inv = 1.0 / am;
        const double shift = (s - 1.0) * log_x - std::log(am) - log_ref;
        auto piece = [&](double w) {
            const double u = std::pow(w, inv);
            return std::exp((ap - 1.0) * std::log1p(u) - ls * x * u + shift);
        };
        add(specfun::integrate(piece, 0.0, 1.0, 0.0, rel, max_segments));
    }
    double lower = x;
    if (x < c) {
        // [x, c] in t = ln y, which stays smooth however small x is.
        auto piece = [&](double t) {
            const double y = std::exp(t);
            return std::exp(log_kernel(y, t) + t - log_ref);
        };
        add(specfun::integrate(piece, log_x, std::log(c), 0.0, rel, max_segments));
        lower = c;
    }
    auto tail = [&](double y) { return std::exp(log_kernel(y, std::log(y)) - log_ref); };
    add(specfun::integrate_to_infinity(tail, lower, 0.0, rel, max_segments));

    if (!ok || !(total > 0.0) || !std::isfinite(total))
        throw EvaluationError("pdf_quadrature: convolution integral did not converge", total);
    return ap * std::log(lp) + am * std::log(lm) - specfun::ln_gamma(ap) - specfun::ln_gamma(am) -
           lp * x + std::log(total) + log_ref;
}

inline double pdf_quadrature(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    return std::exp(log_pdf_quadrature(p, x, policy));
}

/// ln f(0). Finite exactly when alpha+ + alpha- > 1, where the convolution
/// integral at x = 0 is Gamma(a+ + a- - 1)/(l+ + l-)^{a+ + a- - 1} times the
/// usual normalisation.
inline double log_pdf_at_zero(const BgParams& p) {
    const double s = p.shape_sum();
    if (s <= 1.0) throw PoleError("pdf: density has a pole at x = 0 when alpha+ + alpha- <= 1");
    return p.alpha_plus() * std::log(p.lambda_plus()) + p.alpha_minus() * std::log(p.lambda_minus()) +
           specfun::ln_gamma(s - 1.0) - (s - 1.0) * std::log(p.rate_sum()) -
           specfun::ln_gamma(p.alpha_plus()) - specfun::ln_gamma(p.alpha_minus());
}

struct BranchValue {
    double log_value;
    DensityBranch branch;
};

namespace detail {

inline BranchValue log_pdf_positive(const BgParams& p, double x, const EvalPolicy& policy) {
    const DensityBranch branch = select_branch(p);
    // The special-function paths work in z = x (l+ + l-), which is unusable
    // once it leaves the normal range.
    if (branch != DensityBranch::IntegerShape &&
        0.5 * x * p.rate_sum() < std::numeric_limits<double>::min())
        return {log_pdf_quadrature(p, x, policy), DensityBranch::QuadratureFallback};
    try {
        switch (branch) {
            case DensityBranch::IntegerShape: return {log_pdf_integer_shape(p, x), branch};
            case DensityBranch::EqualAlphaBessel: return {log_pdf_equal_alpha(p, x, policy), branch};
            default: return {log_pdf_whittaker(p, x, policy), branch};
        }
    } catch (const EvaluationError&) {
        return {log_pdf_quadrature(p, x, policy), DensityBranch::QuadratureFallback};
    }
}

}  // namespace detail

/// ln f(x) together with the branch that produced it.
inline BranchValue log_pdf_with_branch(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    if (std::isnan(x)) throw DomainError("pdf: x is NaN");
    if (std::isinf(x)) return {-std::numeric_limits<double>::infinity(), select_branch(p, x)};
    if (x == 0.0) return {log_pdf_at_zero(p), select_branch(p)};
    if (x < 0.0) return detail::log_pdf_positive(p.reflected(), -x, policy);
    return detail::log_pdf_positive(p, x, policy);
}

inline double log_pdf(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    return log_pdf_with_branch(p, x, policy).log_value;
}

/// Density of the bilateral Gamma law. Throws PoleError at x = 0 when
/// alpha+ + alpha- <= 1.
inline double pdf(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    return std::exp(log_pdf(p, x, policy));
}

/// f'(x) for x != 0. On x > 0, differentiating the convolution form gives
///   f'(x) = C e^{-l+ x} [ -l+ I(a+ - 1) + (a+ - 1) I(a+ - 2) ],
///   I(e) = int_0^inf v^{a- - 1} (x + v/(l+ + l-))^e e^{-v} dv,
/// and each I(e) is a scaled Whittaker function. x < 0 uses f'(x) = -f~'(-x)
/// with f~ the reflected density.
inline double pdf_derivative(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    if (x == 0.0 || !std::isfinite(x))
        throw DomainError("pdf_derivative: x must be nonzero and finite");
    if (x < 0.0) return -pdf_derivative(p.reflected(), -x, policy);
    const double ap = p.alpha_plus();
    const double am = p.alpha_minus();
    const double z = x * p.rate_sum();
    const double log_pref = detail::log_positive_prefactor(p) + (ap - 1.0) * std::log(x) -
                            p.lambda_plus() * x;
    const double j1 = specfun::whittaker_w_scaled(0.5 * (ap - am), 0.5 * (ap + am - 1.0), z, policy);
    double bracket = -p.lambda_plus() * j1;
    if (ap != 1.0) {
        const double j2 =
            specfun::whittaker_w_scaled(0.5 * (ap - 1.0 - am), 0.5 * (ap + am - 2.0), z, policy);
        bracket += (ap - 1.0) * j2 / x;
    }
    return std::exp(log_pref) * bracket;
}

/// f'(0) in closed form for alpha+ > 1, alpha- > 1:
///   l+^a+ l-^a- / (l+ + l-)^{a+ + a- - 2} Gamma(a+ + a- - 2)/(Gamma(a+ - 1) Gamma(a-))
///   * [1 - l+/(l+ + l-) (a+ + a- - 2)/(a+ - 1)].
inline double f_prime_at_zero(const BgParams& p) {
    const double ap = p.alpha_plus();
    const double am = p.alpha_minus();
    if (!(ap > 1.0 && am > 1.0))
        throw ContractError("f_prime_at_zero: requires alpha_plus > 1 and alpha_minus > 1");
    const double s = ap + am;
    const double ls = p.rate_sum();
    const double log_mag = ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus()) -
                           (s - 2.0) * std::log(ls) + specfun::ln_gamma(s - 2.0) -
                           specfun::ln_gamma(ap - 1.0) - specfun::ln_gamma(am);
    const double bracket = 1.0 - p.lambda_plus() / ls * (s - 2.0) / (ap - 1.0);
    return std::exp(log_mag) * bracket;
}

}  // namespace bgamma
