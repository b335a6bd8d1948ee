#pragma once

// Reference implementations for testing. Nothing here calls into density,
// distribution or simfit; the only shared code is ln_gamma and the parameter
// type.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/rng.hpp"
#include "bgamma/specfun/gamma.hpp"

namespace bgamma::oracle {

/// Outcome of comparing one product operation against an oracle. A threshold
/// left empty is not checked; passed means every checked error is strictly
/// below its threshold.
struct OracleReport {
    std::string target;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    std::optional<double> abs_threshold;
    std::optional<double> rel_threshold;
    std::vector<double> grid;
    bool passed = false;

    void finish() {
        passed = (!abs_threshold || max_abs_err < *abs_threshold) &&
                 (!rel_threshold || max_rel_err < *rel_threshold);
    }
};

/// Density at x > 0 by integrating the convolution of the two Gamma laws,
///   f(x) = K e^{-l+ x} int_0^inf v^{a- - 1} (x + v/(l+ + l-))^{a+ - 1} e^{-v} dv,
///   K = l+^a+ l-^a- / ((l+ + l-)^a- Gamma(a+) Gamma(a-)),
/// with double-exponential quadrature. Negative x is handled by swapping
/// the roles of the two sides.
inline double pdf_quadrature_oracle(const BgParams& p, double x) {
    if (x < 0.0) return pdf_quadrature_oracle(p.reflected(), -x);
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("pdf_quadrature_oracle: x must be positive");
    const double ap = p.alpha_plus(), am = p.alpha_minus();
    const double ls = p.lambda_plus() + p.lambda_minus();
    auto integrand = [&](double v) {
        if (v <= 0.0) return 0.0;
        return std::exp((am - 1.0) * std::log(v) + (ap - 1.0) * std::log(x + v / ls) - v);
    };
    const double v0 = x * ls;  // (x + v/ls) doubles here; its zero sits at -v0
    const double v1 = v0 + std::max(1.0, am + ap);
    const double tol = 1e-14;
    double total = 0.0;
    double err = 0.0, l1 = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    double e = 0.0, l = 0.0;
    // v = v0 w^{1/a-} absorbs the v^{a- - 1} endpoint singularity.
    auto near_zero = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double v = v0 * std::pow(w, 1.0 / am);
        return std::exp(am * std::log(v0) + (ap - 1.0) * std::log(x + v / ls) - v) / am;
    };
    total += ts.integrate(near_zero, 0.0, 1.0, tol, &e, &l);
    err += e;
    l1 += l;
    // Between v0 and v1 the pieces grow geometrically so that the zero of
    // (x + v/ls) at -v0 never sits close to a piece relative to its length.
    for (double a = v0; a < v1;) {
        const double b = std::min(v1, std::max(2.0 * a, a + 1e-300));
        // Boost's error estimate is not scaled by the interval length, so
        // integrate over [0, 1].
        const double len = b - a;
        auto unit = [&](double w) { return len * integrand(a + len * w); };
        total += ts.integrate(unit, 0.0, 1.0, tol, &e, &l);
        err += e;
        l1 += l;
        a = b;
    }
    total += es.integrate(integrand, v1, std::numeric_limits<double>::infinity(), tol, &e, &l);
    err += e;
    l1 += l;
    if (!(total > 0.0) || !std::isfinite(total) || err > 1e-11 * l1)
        throw OracleError("pdf_quadrature_oracle: quadrature did not reach tolerance");
    const double log_k = ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus()) -
                         am * std::log(ls) - specfun::ln_gamma(ap) - specfun::ln_gamma(am);
    return std::exp(log_k - p.lambda_plus() * x) * total;
}

namespace detail {

// E[e^{itX}] at complex t, principal powers.
inline std::complex<double> phi(const BgParams& p, std::complex<double> t) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    const C lp(p.lambda_plus(), 0.0), lm(p.lambda_minus(), 0.0);
    return std::pow(lp / (lp - i * t), p.alpha_plus()) * std::pow(lm / (lm + i * t), p.alpha_minus());
}

// int_Z^inf phi(t) e^{-itx} dt. Off x = 0 the path is turned into the half
// plane where e^{-itx} decays (t = Z -+ i tau), which keeps clear of the
// singularities of phi at -i l+ and i l-.
inline std::complex<double> fourier_tail(const BgParams& p, double z_cut, double x) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    boost::math::quadrature::exp_sinh<double> es;
    const double inf = std::numeric_limits<double>::infinity();
    const double tol = 1e-9;
    if (x == 0.0) {
        auto re = [&](double u) { return phi(p, C(z_cut + u, 0.0)).real(); };
        auto im = [&](double u) { return phi(p, C(z_cut + u, 0.0)).imag(); };
        return C(es.integrate(re, 0.0, inf, tol), es.integrate(im, 0.0, inf, tol));
    }
    const double dir = x > 0.0 ? -1.0 : 1.0;
    const double ax = std::abs(x);
    auto g = [&](double tau) { return std::exp(-tau * ax) * phi(p, C(z_cut, dir * tau)); };
    auto re = [&](double tau) { return g(tau).real(); };
    auto im = [&](double tau) { return g(tau).imag(); };
    const C integral(es.integrate(re, 0.0, inf, tol), es.integrate(im, 0.0, inf, tol));
    return dir * i * std::exp(C(0.0, -z_cut * x)) * integral;
}

}  // namespace detail

struct DensityGrid {
    std::vector<double> x;
    std::vector<double> density;
};

/// Density on x_j = -H + 2 H j / N (j = 0..N-1) by Fourier inversion,
///   f(x) = (1/pi) Re int_0^inf phi(t) e^{-itx} dt.
/// The integral is a trapezoid sum over t_k = k pi/H, k < N, evaluated for
/// all x_j with one FFT, plus the remainder beyond t_{N-1} computed per point
/// along a rotated contour. Requires a+ + a- > 1 so that phi is integrable.
inline DensityGrid pdf_fft_oracle(const BgParams& p, std::size_t grid_size, double domain_halfwidth) {
    if (!(p.alpha_plus() + p.alpha_minus() > 1.0))
        throw OracleError("pdf_fft_oracle: needs alpha+ + alpha- > 1");
    if (grid_size < 4096 || (grid_size & (grid_size - 1)) != 0)
        throw OracleError("pdf_fft_oracle: grid size must be a power of two >= 4096");
    if (!(domain_halfwidth > 0.0) || !std::isfinite(domain_halfwidth))
        throw OracleError("pdf_fft_oracle: half-width must be positive");
    const std::size_t n = grid_size;
    const double h = domain_halfwidth;
    const double dx = 2.0 * h / static_cast<double>(n);
    const double dt = 3.14159265358979323846 / h;

    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw OracleError("pdf_fft_oracle: allocation failed");
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> v = detail::phi(p, {dt * static_cast<double>(k), 0.0});
        double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        if (k % 2 == 1) w = -w;  // e^{i t_k H} = (-1)^k
        buf[k][0] = w * v.real() * dt;
        buf[k][1] = w * v.imag() * dt;
    }
    fftw_execute(plan);

    DensityGrid out;
    out.x.resize(n);
    out.density.resize(n);
    const double z_cut = dt * static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = -h + dx * static_cast<double>(j);
        const double tail = detail::fourier_tail(p, z_cut, x).real();
        out.x[j] = x;
        out.density[j] = (buf[j][0] + tail) / 3.14159265358979323846;
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return out;
}

/// Half-width covering mean +- 40 standard deviations.
inline double default_fft_halfwidth(const BgParams& p) {
    const double ap = p.alpha_plus(), lp = p.lambda_plus();
    const double am = p.alpha_minus(), lm = p.lambda_minus();
    const double mean = ap / lp - am / lm;
    const double sd = std::sqrt(ap / (lp * lp) + am / (lm * lm));
    return std::abs(mean) + 40.0 * sd;
}

struct MomentEstimate {
    double mean, variance, skewness, kurtosis;
    double se_mean, se_variance, se_skewness, se_kurtosis;
    std::size_t n;
};

/// Sample moments of n draws with grouped jackknife standard errors (up to
/// 1000 groups). Draws come from std::gamma_distribution on a generator
/// seeded from rng, independent of the library sampler.
inline MomentEstimate mc_moment_oracle(const BgParams& p, std::size_t n, RngState& rng) {
    if (n < 10000) throw OracleError("mc_moment_oracle: needs n >= 10^4");
    std::mt19937_64 engine(rng.next_u64());
    std::gamma_distribution<double> gp(p.alpha_plus(), 1.0 / p.lambda_plus());
    std::gamma_distribution<double> gm(p.alpha_minus(), 1.0 / p.lambda_minus());
    std::vector<double> xs(n);
    for (auto& v : xs) {
        const double a = gp(engine);
        v = a - gm(engine);
    }
    // Shift by a pilot mean to limit cancellation in the power sums.
    double shift = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) shift += xs[i];
    shift /= 1000.0;

    const std::size_t groups = 1000;
    std::vector<std::array<long double, 4>> sums(groups, {0.0L, 0.0L, 0.0L, 0.0L});
    std::vector<std::size_t> counts(groups, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t g = i * groups / n;
        const long double y = xs[i] - shift;
        const long double y2 = y * y;
        sums[g][0] += y;
        sums[g][1] += y2;
        sums[g][2] += y2 * y;
        sums[g][3] += y2 * y2;
        ++counts[g];
    }
    std::array<long double, 4> total{0.0L, 0.0L, 0.0L, 0.0L};
    for (const auto& s : sums)
        for (int k = 0; k < 4; ++k) total[k] += s[k];

    auto estimate = [&](const std::array<long double, 4>& s, long double m) {
        const long double mu = s[0] / m;
        const long double e2 = s[1] / m, e3 = s[2] / m, e4 = s[3] / m;
        const long double c2 = e2 - mu * mu;
        const long double c3 = e3 - 3.0L * mu * e2 + 2.0L * mu * mu * mu;
        const long double c4 = e4 - 4.0L * mu * e3 + 6.0L * mu * mu * e2 - 3.0L * mu * mu * mu * mu;
        return std::array<double, 4>{static_cast<double>(mu) + shift,
                                     static_cast<double>(c2 * m / (m - 1.0L)),
                                     static_cast<double>(c3 / std::pow(c2, 1.5L)),
                                     static_cast<double>(c4 / (c2 * c2))};
    };
    const auto full = estimate(total, static_cast<long double>(n));
    std::vector<std::array<double, 4>> leave(groups);
    std::array<double, 4> avg{0.0, 0.0, 0.0, 0.0};
    for (std::size_t g = 0; g < groups; ++g) {
        auto s = total;
        for (int k = 0; k < 4; ++k) s[k] -= sums[g][k];
        leave[g] = estimate(s, static_cast<long double>(n - counts[g]));
        for (int k = 0; k < 4; ++k) avg[k] += leave[g][k] / static_cast<double>(groups);
    }
    std::array<double, 4> se{0.0, 0.0, 0.0, 0.0};
    for (const auto& l : leave)
        for (int k = 0; k < 4; ++k) se[k] += (l[k] - avg[k]) * (l[k] - avg[k]);
    const double factor = static_cast<double>(groups - 1) / static_cast<double>(groups);
    for (auto& v : se) v = std::sqrt(factor * v);
    return {full[0], full[1], full[2], full[3], se[0], se[1], se[2], se[3], n};
}

}  // namespace bgamma::oracle
