#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <utility>

#include "bgamma/density.hpp"
#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/constants.hpp"
#include "bgamma/specfun/gamma.hpp"
#include "bgamma/specfun/quadrature.hpp"

namespace bgamma {

enum class Taxonomy { Pole, SteepCusp, OffsetInfiniteSlope, ExponentialPeak, Smooth };

inline std::string_view to_string(Taxonomy t) {
    switch (t) {
        case Taxonomy::Pole: return "Pole";
        case Taxonomy::SteepCusp: return "SteepCusp";
        case Taxonomy::OffsetInfiniteSlope: return "OffsetInfiniteSlope";
        case Taxonomy::ExponentialPeak: return "ExponentialPeak";
        case Taxonomy::Smooth: return "Smooth";
    }
    return "?";
}

/// Behaviour of f^(N) as x decreases to 0 from the right.
struct NearZeroClass {
    enum class Tag { FiniteLimit, PowerDivergence, SlowlyVaryingDivergence };
    Tag tag = Tag::FiniteLimit;
    double alpha_exp = 0.0;  // PowerDivergence: f^(N)(x) ~ c1 x^{-alpha_exp}
    double c1 = 0.0;
    double c2 = 0.0;  // SlowlyVaryingDivergence: limit of f^(N)(x) - f^(N)(-x)
};

inline std::string_view to_string(NearZeroClass::Tag t) {
    switch (t) {
        case NearZeroClass::Tag::FiniteLimit: return "FiniteLimit";
        case NearZeroClass::Tag::PowerDivergence: return "PowerDivergence";
        case NearZeroClass::Tag::SlowlyVaryingDivergence: return "SlowlyVaryingDivergence";
    }
    return "?";
}

struct ModeResult {
    double mode;
    double lower;  // bracket from the sign rule; equal to mode when the mode is 0 by case analysis
    double upper;
};

struct ShapeReport {
    int smoothness_n;
    ModeResult mode;
    Taxonomy taxonomy;
    NearZeroClass near_zero_plus;   // x -> 0+
    NearZeroClass near_zero_minus;  // x -> 0-, from the reflected law
    std::pair<double, double> tail_exponents;
    std::pair<double, double> tail_rates;
    std::pair<double, double> tail_constants;
};

/// N with N < a+ + a- <= N + 1; a sum within 1e-12 of an integer counts as
/// that integer.
inline int smoothness_class(const BgParams& p) {
    const double s = p.shape_sum();
    const double r = std::round(s);
    if (std::abs(s - r) <= detail::integer_tolerance) return static_cast<int>(r) - 1;
    return static_cast<int>(std::ceil(s)) - 1;
}

namespace detail {

inline bool near_one(double a) { return std::abs(a - 1.0) <= integer_tolerance; }

// Maximiser of pdf on (lo, hi), where pdf is known to be unimodal. Golden
// section first; its final estimate is then sharpened by bisection on the
// sign of f', because comparing function values cannot resolve the peak
// below ~sqrt(eps) relative to the bracket.
inline double locate_peak(const BgParams& p, double lo, double hi, const EvalPolicy& policy) {
    const double width = hi - lo;
    const double tol = 1e-10 * width;
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = pdf(p, c, policy), fd = pdf(p, d, policy);
    for (int it = 0; it < 400 && b - a > tol; ++it) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = pdf(p, d, policy);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = pdf(p, c, policy);
        }
    }
    double estimate = 0.5 * (a + b);

    auto slope = [&](double x) { return x == 0.0 ? 0.0 : pdf_derivative(p, x, policy); };
    const double delta = std::max(1e-6 * width, 4.0 * tol);
    double left = std::max(lo, estimate - delta);
    double right = std::min(hi, estimate + delta);
    if (!(left > lo && slope(left) > 0.0)) left = lo;
    if (!(right < hi && slope(right) < 0.0)) right = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (left + right);
        if (mid <= left || mid >= right) break;
        if (mid == 0.0) break;
        const double s = slope(mid);
        if (s > 0.0)
            left = mid;
        else if (s < 0.0)
            right = mid;
        else
            return mid;
    }
    return 0.5 * (left + right);
}

}  // namespace detail

/// Mode of the (strictly unimodal) density.
///  - a+ <= 1 and a- <= 1: the mode is 0.
///  - a+ > 1 >= a-: mode in (0, (a+ - 1)/l+); mirrored for a- > 1 >= a+.
///  - both > 1: mode in (-(a- - 1)/l-, (a+ - 1)/l+), on the side given by the
///    sign of l- a+ - l+ a- - (l- - l+), and 0 when that quantity vanishes.
inline ModeResult mode(const BgParams& p, const EvalPolicy& policy = {}) {
    const double ap = p.alpha_plus(), am = p.alpha_minus();
    const double lp = p.lambda_plus(), lm = p.lambda_minus();
    if (ap <= 1.0 && am <= 1.0) return {0.0, 0.0, 0.0};
    const double right = ap > 1.0 ? (ap - 1.0) / lp : 0.0;
    const double left = am > 1.0 ? -(am - 1.0) / lm : 0.0;
    if (am <= 1.0) return {detail::locate_peak(p, 0.0, right, policy), 0.0, right};
    if (ap <= 1.0) return {detail::locate_peak(p, left, 0.0, policy), left, 0.0};
    const double d = lm * ap - lp * am - (lm - lp);
    const double scale = std::max({1.0, std::abs(lm * ap), std::abs(lp * am), lm, lp});
    if (std::abs(d) <= 1e-12 * scale) return {0.0, left, right};
    if (d > 0.0) return {detail::locate_peak(p, 0.0, right, policy), left, right};
    return {detail::locate_peak(p, left, 0.0, policy), left, right};
}

/// Near-zero class on the positive side:
///   a+ integer                    -> finite limit of f^(N)
///   a+ + a- not integer           -> f^(N)(x) ~ C1 x^{-(N + 1 - a+ - a-)}
///   a+ + a- integer               -> slowly varying divergence with
///                                    f^(N)(x) - f^(N)(-x) -> C2
inline NearZeroClass near_zero_class(const BgParams& p) {
    NearZeroClass out;
    const double ap = p.alpha_plus(), am = p.alpha_minus();
    if (detail::as_positive_integer(ap) > 0) return out;
    const double s = p.shape_sum();
    const int n = smoothness_class(p);
    const double log_rates = ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus());
    if (detail::is_integral(s)) {
        out.tag = NearZeroClass::Tag::SlowlyVaryingDivergence;
        const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
        out.c2 = 0.5 * std::exp(log_rates) *
                 (sign * std::cos(ap * specfun::pi) + std::cos(am * specfun::pi));
        return out;
    }
    out.tag = NearZeroClass::Tag::PowerDivergence;
    out.alpha_exp = n + 1 - s;
    out.c1 = std::exp(log_rates - specfun::ln_gamma(s - n)) * std::sin(ap * specfun::pi) /
             std::sin(s * specfun::pi);
    return out;
}

/// (C3, C4) with f(x) ~ C3 x^{a+ - 1} e^{-l+ x} as x -> inf and
/// f(x) ~ C4 |x|^{a- - 1} e^{-l- |x|} as x -> -inf.
inline std::pair<double, double> tail_constants(const BgParams& p) {
    const double ap = p.alpha_plus(), am = p.alpha_minus();
    const double log_rates = ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus());
    const double log_sum = std::log(p.rate_sum());
    return {std::exp(log_rates - am * log_sum - specfun::ln_gamma(ap)),
            std::exp(log_rates - ap * log_sum - specfun::ln_gamma(am))};
}

/// Limits of ln f(x)/x as x -> +inf and x -> -inf.
inline std::pair<double, double> log_tail_slopes(const BgParams& p) {
    return {-p.lambda_plus(), p.lambda_minus()};
}

inline Taxonomy taxonomy(const BgParams& p) {
    const int n = smoothness_class(p);
    if (n == 0) return Taxonomy::Pole;
    if (n >= 2) return Taxonomy::Smooth;
    const double ap = p.alpha_plus(), am = p.alpha_minus();
    if (detail::near_one(ap) && detail::near_one(am)) return Taxonomy::ExponentialPeak;
    if ((ap > 1.0 && !detail::near_one(ap)) || (am > 1.0 && !detail::near_one(am)))
        return Taxonomy::OffsetInfiniteSlope;
    return Taxonomy::SteepCusp;
}

inline ShapeReport shape_report(const BgParams& p, const EvalPolicy& policy = {}) {
    ShapeReport r{};
    r.smoothness_n = smoothness_class(p);
    r.mode = mode(p, policy);
    r.taxonomy = taxonomy(p);
    r.near_zero_plus = near_zero_class(p);
    r.near_zero_minus = near_zero_class(p.reflected());
    r.tail_exponents = {p.alpha_plus() - 1.0, p.alpha_minus() - 1.0};
    r.tail_rates = {p.lambda_plus(), p.lambda_minus()};
    r.tail_constants = tail_constants(p);
    return r;
}

namespace detail {

// int_0^inf f(x + sign*u) e^{-rate u} du. When the shifted argument passes
// through 0 (u = c) the pieces next to c are mapped by r = w^q so that a
// |r|^{s-1} singularity of f at 0 becomes integrable without endpoint trouble.
inline double shifted_pdf_integral(const BgParams& p, double x, double sign, double rate,
                                   const EvalPolicy& policy) {
    const double s = p.shape_sum();
    const double q = std::max(1.0, 2.0 / s);
    const double rel = 1e-11;
    const long max_segments = 20000;
    auto g = [&](double u) { return pdf(p, x + sign * u, policy) * std::exp(-rate * u); };
    auto check = [](const specfun::QuadratureResult& r) {
        if (!r.converged)
            throw EvaluationError("integro_diff_residual: quadrature did not converge", r.value,
                                  r.abs_error, r.evaluations);
        return r.value;
    };
    const double c = sign * x > 0.0 ? 0.0 : std::abs(x);  // u at which x + sign*u = 0
    const double len = std::max(c, 1.0 / rate);
    double total = 0.0;
    if (c > 0.0) {
        auto before = [&](double w) {
            const double r = c * std::pow(w, q);
            return g(c - r) * c * q * std::pow(w, q - 1.0);
        };
        total += check(specfun::integrate(before, 0.0, 1.0, 0.0, rel, max_segments));
    }
    auto after = [&](double w) {
        const double r = len * std::pow(w, q);
        return g(c + r) * len * q * std::pow(w, q - 1.0);
    };
    if (c > 0.0)
        total += check(specfun::integrate(after, 0.0, 1.0, 0.0, rel, max_segments));
    else
        total += check(specfun::integrate(g, 0.0, len, 0.0, rel, max_segments));
    total += check(specfun::integrate_to_infinity(g, c + len, 0.0, rel, max_segments));
    return total;
}

}  // namespace detail

/// Residual of the integro-differential equation
///   x f'(x) - (a+ + a- - 1) f(x) + a+ l+ int_0^inf f(x - u) e^{-l+ u} du
///                               + a- l- int_0^inf f(x + u) e^{-l- u} du = 0.
inline double integro_diff_residual(const BgParams& p, double x, const EvalPolicy& policy = {}) {
    if (x == 0.0 || !std::isfinite(x))
        throw DomainError("integro_diff_residual: x must be nonzero and finite");
    const double i_plus = detail::shifted_pdf_integral(p, x, -1.0, p.lambda_plus(), policy);
    const double i_minus = detail::shifted_pdf_integral(p, x, 1.0, p.lambda_minus(), policy);
    return x * pdf_derivative(p, x, policy) - (p.shape_sum() - 1.0) * pdf(p, x, policy) +
           p.alpha_plus() * p.lambda_plus() * i_plus + p.alpha_minus() * p.lambda_minus() * i_minus;
}

}  // namespace bgamma
