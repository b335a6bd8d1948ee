#pragma once

#include <array>
#include <cmath>

#include "bgamma/errors.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/constants.hpp"

namespace bgamma::specfun {

namespace detail {

// Taylor coefficients of 1/Gamma(z) about 0: 1/Gamma(z) = sum_k c_k z^k.
inline constexpr std::array<double, 27> rgamma_taylor = {
    0.0,
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16};

// For |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
//   gampl = 1/Gamma(1+mu), gammi = 1/Gamma(1-mu)
struct TemmeGammas {
    double gam1, gam2, gampl, gammi;
};

inline TemmeGammas temme_gammas(double mu) {
    // 1/Gamma(1+x) = sum_{k>=1} c_k x^{k-1}
    double even = 0.0;  // sum over even k of c_k mu^{k-2}
    double odd = 0.0;   // sum over odd k of c_k mu^{k-1}
    const double mu2 = mu * mu;
    double p = 1.0;
    for (std::size_t k = 1; k < rgamma_taylor.size(); k += 2) {
        odd += rgamma_taylor[k] * p;
        if (k + 1 < rgamma_taylor.size()) even += rgamma_taylor[k + 1] * p;
        p *= mu2;
    }
    TemmeGammas g{};
    g.gam1 = -even;
    g.gam2 = odd;
    g.gampl = odd + mu * even;
    g.gammi = odd - mu * even;
    return g;
}

// K_{n+1/2}(x) e^{x} = sqrt(pi/(2x)) sum_{k=0}^{n} (n+k)!/(k!(n-k)!) (2x)^{-k}
inline double bessel_k_half_integer_scaled(int n, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= n; ++k) {
        term *= static_cast<double>((n + k) * (n - k + 1)) / (2.0 * k * x);
        sum += term;
    }
    return std::sqrt(pi / (2.0 * x)) * sum;
}

}  // namespace detail

/// e^x K_nu(x) for x > 0 (modified Bessel function of the third kind).
///
/// Half-integer orders use the terminating closed form. Otherwise the order
/// is reduced to mu in [-1/2, 1/2]: Temme's series for x < 2, Steed's
/// continued fraction CF2 for x >= 2, then forward recurrence in the order,
/// which is stable for K.
inline double bessel_k_scaled(double nu, double x, const EvalPolicy& policy = {}) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("bessel_k: argument must be positive and finite");
    if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
    nu = std::abs(nu);

    const double twice = 2.0 * nu;
    if (std::abs(twice - std::round(twice)) < 1e-15 && static_cast<long>(std::round(twice)) % 2 == 1)
        return detail::bessel_k_half_integer_scaled(static_cast<int>(std::round(nu - 0.5)), x);

    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;
    const double mu2 = mu * mu;
    const double xi = 1.0 / x;
    const double xi2 = 2.0 * xi;
    const double eps = 0.1 * policy.rel_tol();
    double k_mu = 0.0;
    double k_mu1 = 0.0;

    if (x < 2.0) {
        const double x2 = 0.5 * x;
        const double pimu = pi * mu;
        const double fact = std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = std::abs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
        const detail::TemmeGammas g = detail::temme_gammas(mu);
        double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / g.gampl;
        double q = 0.5 / (e * g.gammi);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        long i = 1;
        for (; i <= policy.max_terms(); ++i) {
            const double di = static_cast<double>(i);
            ff = (di * ff + p + q) / (di * di - mu2);
            c *= d / di;
            p /= di - mu;
            q /= di + mu;
            const double del = c * ff;
            sum += del;
            const double del1 = c * (p - di * ff);
            sum1 += del1;
            if (std::abs(del) < std::abs(sum) * eps) break;
        }
        if (i > policy.max_terms())
            throw EvaluationError("bessel_k: Temme series did not converge", sum);
        const double scale = std::exp(x);
        k_mu = sum * scale;
        k_mu1 = sum1 * xi2 * scale;
    } else {
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d;
        double delh = d;
        double q1 = 0.0;
        double q2 = 1.0;
        const double a1 = 0.25 - mu2;
        double q = a1;
        double c = a1;
        double a = -a1;
        double s = 1.0 + q * delh;
        long i = 2;
        for (; i <= policy.max_terms(); ++i) {
            const double di = static_cast<double>(i);
            a -= 2.0 * (di - 1.0);
            c = -a * c / di;
            const double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            const double dels = q * delh;
            s += dels;
            if (std::abs(dels / s) < eps) break;
        }
        if (i > policy.max_terms())
            throw EvaluationError("bessel_k: continued fraction did not converge", s);
        h = a1 * h;
        k_mu = std::sqrt(pi / (2.0 * x)) / s;
        k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
    }

    for (int i = 1; i <= nl; ++i) {
        const double next = (mu + i) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    return k_mu;
}

/// Modified Bessel function of the third kind K_nu(x), x > 0. K_{-nu} = K_nu.
inline double bessel_k(double nu, double x, const EvalPolicy& policy = {}) {
    const double scaled = bessel_k_scaled(nu, x, policy);
    return scaled * std::exp(-x);
}

}  // namespace bgamma::specfun
