#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bgamma/errors.hpp"

namespace bgamma::specfun {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = fc * gauss_weights[3];
    double result_kronrod = fc * kronrod_weights[7];
    double abs_kronrod = std::abs(result_kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        result_kronrod += kronrod_weights[j] * pair;
        abs_kronrod += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) result_gauss += gauss_weights[j / 2] * pair;
    }
    const double mean = 0.5 * result_kronrod;
    double asc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = result_kronrod * half;
    double err = std::abs((result_kronrod - result_gauss) * half);
    asc *= std::abs(half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_kronrod * std::abs(half) > std::numeric_limits<double>::min() / (50 * eps))
        err = std::max(err, 50.0 * eps * abs_kronrod * std::abs(half));
    if (!std::isfinite(value))
        throw EvaluationError("quadrature: integrand produced a non-finite value");
    return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval: the
/// segment with the largest error estimate is halved until the total error
/// estimate is below max(abs_tol, rel_tol * |I|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                           long max_segments = 4000) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::gauss_kronrod_15(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    long evaluations = 15;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<long>(heap.size()) >= max_segments) {
            out.value = total;
            out.abs_error = error;
            out.evaluations = evaluations;
            return out;
        }
        const detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Segment can no longer be split in floating point.
            heap.push({worst.a, worst.b, worst.value, 0.0});
            error -= worst.error;
            continue;
        }
        const detail::Segment left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Segment right = detail::gauss_kronrod_15(f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if (error < 0.0 || heap.size() % 64 == 0) {
            // Resum to shed accumulated cancellation in the running totals.
            auto copy = heap;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    out.value = total;
    out.abs_error = error;
    out.evaluations = evaluations;
    out.converged = true;
    return out;
}

/// Integral over [a, inf) through t = a + u/(1-u), u in [0,1).
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol,
                                       long max_segments = 4000) {
    auto mapped = [&f, a](double u) {
        const double one_minus = 1.0 - u;
        const double t = a + u / one_minus;
        if (!std::isfinite(t)) return 0.0;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, abs_tol, rel_tol, max_segments);
}

}  // namespace bgamma::specfun
