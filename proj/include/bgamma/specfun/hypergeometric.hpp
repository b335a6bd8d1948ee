#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "bgamma/errors.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/gamma.hpp"
#include "bgamma/specfun/quadrature.hpp"

namespace bgamma::specfun {

namespace detail {

inline double kummer_series(double alpha, double gamma_p, double z, const EvalPolicy& policy) {
    double sum = 1.0;
    double term = 1.0;
    double max_abs_term = 1.0;
    for (long n = 0; n < policy.max_terms(); ++n) {
        const double ratio = (alpha + n) / (gamma_p + n) * z / (n + 1.0);
        term *= ratio;
        sum += term;
        max_abs_term = std::max(max_abs_term, std::abs(term));
        if (term == 0.0) return sum;
        if (std::abs(ratio) < 0.5 && std::abs(term) <= policy.rel_tol() * 0.1 * std::abs(sum)) {
            // Alternating terms (alpha or gamma negative) can cancel badly.
            if (max_abs_term * 1e-16 * n > 1e-6 * std::abs(sum))
                throw EvaluationError("kummer_phi: series lost too many digits to cancellation",
                                      sum, max_abs_term * 1e-16 * n, n + 1);
            return sum;
        }
    }
    throw EvaluationError("kummer_phi: series did not converge", sum, std::abs(term),
                          policy.max_terms());
}

}  // namespace detail

/// Confluent hypergeometric function Phi(alpha, gamma; z), i.e. 1F1, by its
/// power series. Negative z goes through Kummer's transformation
/// Phi(alpha, gamma; z) = e^z Phi(gamma - alpha, gamma; -z) so the summed
/// terms keep one sign whenever gamma > alpha > 0.
inline double kummer_phi(double alpha, double gamma_p, double z,
                         const EvalPolicy& policy = {}) {
    if (gamma_p <= 0.0 && gamma_p == std::floor(gamma_p))
        throw DomainError("kummer_phi: gamma must not be a nonpositive integer");
    if (!std::isfinite(alpha) || !std::isfinite(gamma_p) || !std::isfinite(z))
        throw DomainError("kummer_phi: arguments must be finite");
    if (z == 0.0) return 1.0;
    if (z < 0.0) return std::exp(z) * detail::kummer_series(gamma_p - alpha, gamma_p, -z, policy);
    return detail::kummer_series(alpha, gamma_p, z, policy);
}

namespace detail {

inline void check_whittaker_args(double lam, double mu, double z) {
    if (!(mu - lam > -0.5))
        throw DomainError("whittaker_w: requires mu - lambda > -1/2");
    if (!(z > 0.0) || !std::isfinite(z))
        throw DomainError("whittaker_w: argument must be positive and finite");
}

}  // namespace detail

/// e^{z/2} z^{-lambda} W_{lambda,mu}(z) from the integral representation
///
///   (1/Gamma(a)) int_0^inf t^{a-1} e^{-t} (1 + t/z)^b dt,
///   a = mu - lambda + 1/2 > 0,  b = mu + lambda - 1/2,
///
/// by adaptive Gauss-Kronrod. The interval is cut at c = max(1, a) and at
/// t = z when z < c; [c, inf) is mapped onto [0,1). For a < 1 the piece
/// [0, c] is integrated in s = t^a, which absorbs the t^{a-1} endpoint
/// singularity.
inline double whittaker_w_scaled_quadrature(double lam, double mu, double z,
                                            const EvalPolicy& policy = {}) {
    detail::check_whittaker_args(lam, mu, z);
    const double a = mu - lam + 0.5;
    const double b = mu + lam - 0.5;
    const double lg_a = ln_gamma(a);
    const double lg_a1 = ln_gamma(a + 1.0);
    const double rel = std::max(policy.rel_tol(), 1e-15);
    const double abs_tol = policy.quad_abs_tol();
    const long max_segments = std::max(200L, 4 * policy.max_terms());

    auto tail_factor = [b, z](double t) {
        return b == 0.0 ? 0.0 : b * std::log1p(t / z);
    };
    // Integrand in t.
    auto direct = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp((a - 1.0) * std::log(t) - t + tail_factor(t) - lg_a);
    };
    // Integrand in s = t^a; dt t^{a-1} = ds / a.
    const double inv_a = 1.0 / a;
    auto powered = [&](double s) {
        if (s <= 0.0) return std::exp(-lg_a1);
        const double t = std::pow(s, inv_a);
        return std::exp(-t + tail_factor(t) - lg_a1);
    };

    const double c = std::max(1.0, a);
    double cuts[3] = {0.0, c, c};
    int ncut = 2;
    if (z < c) {
        cuts[1] = z;
        cuts[2] = c;
        ncut = 3;
    }

    double total = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool ok = true;
    for (int i = 0; i + 1 < ncut; ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        QuadratureResult piece;
        if (a < 1.0)
            piece = integrate(powered, std::pow(lo, a), std::pow(hi, a), abs_tol, rel,
                              max_segments);
        else
            piece = integrate(direct, lo, hi, abs_tol, rel, max_segments);
        total += piece.value;
        error += piece.abs_error;
        evaluations += piece.evaluations;
        ok = ok && piece.converged;
    }
    const QuadratureResult tail = integrate_to_infinity(direct, c, abs_tol, rel, max_segments);
    total += tail.value;
    error += tail.abs_error;
    evaluations += tail.evaluations;
    ok = ok && tail.converged;

    if (!ok || !std::isfinite(total))
        throw EvaluationError("whittaker_w: quadrature did not converge", total, error,
                              evaluations);
    return total;
}

/// e^{z/2} z^{-lambda} W_{lambda,mu}(z) from the large-z expansion
///
///   H(z) = 1 + sum_k prod_{j=1..k} [mu^2 - (lambda - j + 1/2)^2] / (k! z^k),
///
/// summed up to the smallest term. Returns nullopt when the smallest term
/// is not below rel_tol relative to the sum.
inline std::optional<double> whittaker_w_scaled_asymptotic(double lam, double mu, double z,
                                                           const EvalPolicy& policy = {}) {
    detail::check_whittaker_args(lam, mu, z);
    double sum = 1.0;
    double term = 1.0;
    double previous = std::abs(term);
    for (long k = 1; k <= policy.max_terms(); ++k) {
        const double shift = lam - static_cast<double>(k) + 0.5;
        term *= (mu * mu - shift * shift) / (static_cast<double>(k) * z);
        if (term == 0.0) return sum;
        if (std::abs(term) <= 0.1 * policy.rel_tol() * std::abs(sum)) return sum + term;
        if (std::abs(term) > previous) return std::nullopt;
        previous = std::abs(term);
        sum += term;
    }
    return std::nullopt;
}

/// Scaled Whittaker function e^{z/2} z^{-lambda} W_{lambda,mu}(z): the
/// asymptotic series above asymptotic_switch_z when it converges to
/// tolerance, the integral representation otherwise.
inline double whittaker_w_scaled(double lam, double mu, double z,
                                 const EvalPolicy& policy = {}) {
    detail::check_whittaker_args(lam, mu, z);
    if (z >= policy.asymptotic_switch_z()) {
        if (auto h = whittaker_w_scaled_asymptotic(lam, mu, z, policy)) return *h;
    }
    return whittaker_w_scaled_quadrature(lam, mu, z, policy);
}

/// Whittaker function W_{lambda,mu}(z) for z > 0 and mu - lambda > -1/2.
inline double whittaker_w(double lam, double mu, double z, const EvalPolicy& policy = {}) {
    const double scaled = whittaker_w_scaled(lam, mu, z, policy);
    return std::exp(lam * std::log(z) - 0.5 * z) * scaled;
}

inline double whittaker_w_quadrature(double lam, double mu, double z,
                                     const EvalPolicy& policy = {}) {
    return std::exp(lam * std::log(z) - 0.5 * z) *
           whittaker_w_scaled_quadrature(lam, mu, z, policy);
}

inline std::optional<double> whittaker_w_asymptotic(double lam, double mu, double z,
                                                    const EvalPolicy& policy = {}) {
    auto h = whittaker_w_scaled_asymptotic(lam, mu, z, policy);
    if (!h) return std::nullopt;
    return std::exp(lam * std::log(z) - 0.5 * z) * *h;
}

}  // namespace bgamma::specfun
