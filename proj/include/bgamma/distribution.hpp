#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "bgamma/density.hpp"
#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/bessel.hpp"
#include "bgamma/specfun/gamma.hpp"
#include "bgamma/specfun/quadrature.hpp"

namespace bgamma {

struct MomentSet {
    double mean;
    double variance;
    double skewness;
    double kurtosis;  // not excess kurtosis
};

struct VgParams {
    double mu;
    double sigma_sq;
    double nu;
};

/// E[e^{izX}] = (l+/(l+ - iz))^{a+} (l-/(l- + iz))^{a-}, principal branch.
inline std::complex<double> char_fn(const BgParams& p, double z) {
    using C = std::complex<double>;
    const C plus = std::log(C(p.lambda_plus(), -z));
    const C minus = std::log(C(p.lambda_minus(), z));
    const C expo = p.alpha_plus() * (std::log(p.lambda_plus()) - plus) +
                   p.alpha_minus() * (std::log(p.lambda_minus()) - minus);
    return std::exp(expo);
}

inline double levy_density(const BgParams& p, double x) {
    if (x == 0.0 || std::isnan(x)) throw DomainError("levy_density: x must be nonzero");
    if (x > 0.0) return p.alpha_plus() / x * std::exp(-p.lambda_plus() * x);
    return p.alpha_minus() / -x * std::exp(p.lambda_minus() * x);
}

/// k(x) with Levy measure k(x)/x dx; decreasing on each half-line.
inline double k_fn(const BgParams& p, double x) {
    if (x == 0.0 || std::isnan(x)) throw DomainError("k_fn: x must be nonzero");
    if (x > 0.0) return p.alpha_plus() * std::exp(-p.lambda_plus() * x);
    return -p.alpha_minus() * std::exp(p.lambda_minus() * x);
}

inline MomentSet moments(const BgParams& p) {
    const double ap = p.alpha_plus(), lp = p.lambda_plus();
    const double am = p.alpha_minus(), lm = p.lambda_minus();
    const double var = ap / (lp * lp) + am / (lm * lm);
    MomentSet m{};
    m.mean = ap / lp - am / lm;
    m.variance = var;
    m.skewness = 2.0 * (ap / (lp * lp * lp) - am / (lm * lm * lm)) / std::pow(var, 1.5);
    m.kurtosis = 3.0 + 6.0 * (ap / std::pow(lp, 4) + am / std::pow(lm, 4)) / (var * var);
    return m;
}

/// Law of c X for c > 0.
inline BgParams scale(const BgParams& p, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scale: c must be positive and finite");
    return BgParams(p.alpha_plus(), p.lambda_plus() / c, p.alpha_minus(), p.lambda_minus() / c);
}

/// Law of X1 + X2 for independent X1, X2 sharing both rates.
inline BgParams convolve(const BgParams& p1, const BgParams& p2) {
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
    if (!same(p1.lambda_plus(), p2.lambda_plus()) || !same(p1.lambda_minus(), p2.lambda_minus()))
        throw ContractError("convolve: both laws must have the same lambda+ and lambda-");
    return BgParams(p1.alpha_plus() + p2.alpha_plus(), p1.lambda_plus(),
                    p1.alpha_minus() + p2.alpha_minus(), p1.lambda_minus());
}

/// P(X - Y <= x), integrating over the negative-side component Y ~ Gamma(a-, l-).
/// For x >= 0 the survival integral is used so the right tail keeps its
/// relative accuracy.
inline double cdf(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    if (std::isnan(x)) throw DomainError("cdf: x is NaN");
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    const double ap = p.alpha_plus(), lp = p.lambda_plus();
    const double am = p.alpha_minus(), lm = p.lambda_minus();
    const double log_norm = am * std::log(lm) - specfun::ln_gamma(am);
    auto density_minus = [&](double y) {
        return std::exp(log_norm + (am - 1.0) * std::log(y) - lm * y);
    };
    const double y_max = specfun::gamma_upper_quantile(am, 1e-14, policy) / lm;
    const double rel = std::max(policy.rel_tol(), 1e-14);
    const double abs_tol = 0.0;

    if (x < 0.0) {
        const double lo = -x;
        auto integrand = [&](double y) {
            const double t = lp * (x + y);
            if (t <= 0.0) return 0.0;
            return specfun::reg_lower_incomplete_gamma(ap, t, policy) * density_minus(y);
        };
        // Split where the incomplete-gamma factor saturates.
        const double knee = lo + std::max(ap, 1.0) / lp;
        const auto r1 = specfun::integrate(integrand, lo, knee, abs_tol, rel);
        const auto r2 = specfun::integrate(integrand, knee, std::max(knee, lo + y_max), abs_tol, rel);
        if (!r1.converged || !r2.converged)
            throw EvaluationError("cdf: quadrature did not converge", r1.value + r2.value);
        return std::clamp(r1.value + r2.value, 0.0, 1.0);
    }

    auto survival = [&](double y) {
        return specfun::reg_upper_incomplete_gamma(ap, lp * (x + y), policy);
    };
    // Near y = 0 the Gamma density may be singular; y = w^{1/a-} removes it.
    const double y_c = std::min(y_max, 1.0 / lm);
    auto near = [&](double w) {
        const double y = std::pow(w, 1.0 / am);
        return survival(y) * std::exp(log_norm - lm * y) / am;
    };
    auto far = [&](double y) { return survival(y) * density_minus(y); };
    const auto r1 = specfun::integrate(near, 0.0, std::pow(y_c, am), abs_tol, rel);
    const auto r2 = specfun::integrate(far, y_c, y_max, abs_tol, rel);
    if (!r1.converged || !r2.converged)
        throw EvaluationError("cdf: quadrature did not converge", 1.0 - r1.value - r2.value);
    return std::clamp(1.0 - (r1.value + r2.value), 0.0, 1.0);
}

/// x with cdf(x) = u. The bracket starts at mean +- 20 sd and doubles (at
/// most 60 times) until it straddles u, then TOMS 748 refines it.
inline double quantile(const BgParams& p, double u, const EvalPolicy& policy = {}) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    const MomentSet m = moments(p);
    const double sd = std::sqrt(m.variance);
    double lo = m.mean - 20.0 * sd;
    double hi = m.mean + 20.0 * sd;
    auto g = [&](double x) { return cdf(p, x, policy) - u; };
    double glo = g(lo), ghi = g(hi);
    for (int i = 0; glo > 0.0 || ghi < 0.0; ++i) {
        if (i == 60) throw EvaluationError("quantile: bracket expansion failed");
        const double w = hi - lo;
        if (glo > 0.0) {
            lo -= w;
            glo = g(lo);
        }
        if (ghi < 0.0) {
            hi += w;
            ghi = g(hi);
        }
    }
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                     boost::math::tools::eps_tolerance<double>(48),
                                                     max_iter);
    return 0.5 * (r.first + r.second);
}

/// Variance Gamma parameters (mu, sigma^2, nu) of an equal-shape law.
inline VgParams vg_params(const BgParams& p) {
    if (std::abs(p.alpha_plus() - p.alpha_minus()) > detail::integer_tolerance)
        throw ContractError("vg_params: requires alpha_plus == alpha_minus");
    const double a = p.alpha_plus();
    return {a / p.lambda_plus() - a / p.lambda_minus(), 2.0 * a / (p.lambda_plus() * p.lambda_minus()),
            1.0 / a};
}

/// Variance Gamma density
///   2 e^{mu x/s2} / (nu^{1/nu} sqrt(2 pi) s Gamma(1/nu))
///   * (x^2/(2 s2/nu + mu^2))^{1/(2nu) - 1/4} K_{1/nu - 1/2}(sqrt(x^2 (2 s2/nu + mu^2))/s2).
inline double vg_pdf(const VgParams& vg, double x, const EvalPolicy& policy = {}) {
    if (x == 0.0 || !std::isfinite(x)) throw DomainError("vg_pdf: x must be nonzero and finite");
    if (!(vg.sigma_sq > 0.0) || !(vg.nu > 0.0) || !std::isfinite(vg.mu))
        throw DomainError("vg_pdf: requires sigma_sq > 0 and nu > 0");
    const double s2 = vg.sigma_sq, nu = vg.nu, mu = vg.mu;
    const double q = 2.0 * s2 / nu + mu * mu;
    const double arg = std::abs(x) * std::sqrt(q) / s2;
    const double log_k = std::log(specfun::bessel_k_scaled(1.0 / nu - 0.5, arg, policy)) - arg;
    const double log_v = std::log(2.0) + mu * x / s2 - std::log(nu) / nu -
                         0.5 * specfun::ln_two_pi - 0.5 * std::log(s2) - specfun::ln_gamma(1.0 / nu) +
                         (1.0 / (2.0 * nu) - 0.25) * std::log(x * x / q) + log_k;
    return std::exp(log_v);
}

}  // namespace bgamma
