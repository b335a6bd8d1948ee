#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bgamma/density.hpp"
#include "bgamma/density_batch.hpp"
#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/rng.hpp"

namespace bgamma {

/// Gamma(shape, rate) variate (Marsaglia-Tsang; shape < 1 through
/// Gamma(a) = Gamma(a + 1) U^{1/a}). The unit-rate draw is divided by rate.
inline double gamma_variate(double shape, double rate, RngState& rng) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw DomainError("gamma_variate: shape and rate must be positive and finite");
    const bool boost = shape < 1.0;
    const double a = boost ? shape + 1.0 : shape;
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double g;
    for (;;) {
        const double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            g = d * v;
            break;
        }
    }
    if (boost) {
        g *= std::exp(std::log(rng.uniform()) / shape);
        // Tiny shapes can underflow; keep the draw strictly positive.
        g = std::max(g, std::numeric_limits<double>::denorm_min());
    }
    return g / rate;
}

/// n draws of X - Y, X ~ Gamma(a+, l+), Y ~ Gamma(a-, l-); X is drawn first.
inline std::vector<double> sample(const BgParams& p, std::size_t n, RngState& rng) {
    if (n == 0) throw DomainError("sample: n must be at least 1");
    std::vector<double> out(n);
    for (auto& v : out) {
        const double x = gamma_variate(p.alpha_plus(), p.lambda_plus(), rng);
        const double y = gamma_variate(p.alpha_minus(), p.lambda_minus(), rng);
        v = x - y;
    }
    return out;
}

struct LoglikResult {
    double value;
    long perturbed_zeros;  // data points equal to 0 moved off a pole
};

/// Sum of ln pdf over the data, evaluated point by point. Exact zeros are
/// moved to +1e-12 * max|x| when the density has a pole at 0.
inline LoglikResult loglik_detailed(const BgParams& p, const std::vector<double>& data,
                                    const EvalPolicy& policy = {}) {
    if (data.empty()) throw DomainError("loglik: data must be nonempty");
    double scale = 0.0;
    for (double x : data) {
        if (!std::isfinite(x)) throw DomainError("loglik: data must be finite");
        scale = std::max(scale, std::abs(x));
    }
    const bool pole = p.shape_sum() <= 1.0;
    const double stand_in = 1e-12 * (scale > 0.0 ? scale : 1.0);
    LoglikResult r{0.0, 0};
    for (double x : data) {
        if (x == 0.0 && pole) {
            ++r.perturbed_zeros;
            x = stand_in;
        }
        r.value += log_pdf(p, x, policy);
    }
    return r;
}

inline double loglik(const BgParams& p, const std::vector<double>& data, const EvalPolicy& policy = {}) {
    return loglik_detailed(p, data, policy).value;
}

/// Starting point from sample moments. The shape level comes from the excess
/// kurtosis, the positive side's share of the variance from the skewness, and
/// the split between the sides is solved so the mean matches. Every field is
/// clamped to [1e-3, 1e4].
inline BgParams moment_match_init(const std::vector<double>& data) {
    if (data.size() < 4) throw FitError("moment_match_init: need at least 4 data points");
    const double n = static_cast<double>(data.size());
    double mean = 0.0;
    for (double x : data) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : data) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0) || !std::isfinite(m2)) throw FitError("moment_match_init: data have zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double excess = m4 / (m2 * m2) - 3.0;

    auto clamp = [](double v) { return std::clamp(v, 1e-3, 1e4); };
    const double alpha0 = std::clamp(3.0 / std::max(excess, 0.05), 1e-3, 1e4);
    const double share = std::clamp(0.5 + 0.25 * std::tanh(skew), 0.05, 0.95);
    const double v_plus = share * m2;
    const double v_minus = (1.0 - share) * m2;
    // Side means are sqrt(alpha v) for shape alpha and variance v; choose
    // alpha+ = alpha0 r, alpha- = alpha0 / r so that their difference is the mean.
    auto mean_gap = [&](double log_r) {
        const double r = std::exp(log_r);
        return std::sqrt(alpha0 * r * v_plus) - std::sqrt(alpha0 / r * v_minus) - mean;
    };
    double lo = -20.0, hi = 20.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_gap(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double r = std::exp(0.5 * (lo + hi));
    const double ap = clamp(alpha0 * r);
    const double am = clamp(alpha0 / r);
    return BgParams(ap, clamp(std::sqrt(ap / v_plus)), am, clamp(std::sqrt(am / v_minus)));
}

struct FitOptions {
    int starts = 5;
    double spread = 0.5;        // sd of the log-space start perturbations
    long max_iterations = 2000;
    double diameter_tol = 1e-8;  // simplex diameter in log-parameter space
    double initial_step = 0.2;  // initial simplex edge in log units
};

struct FitResult {
    BgParams params;
    double log_likelihood;
    long iterations;
    bool converged;
    BgParams init_params;
    int best_start;
    long perturbed_zeros;
};

namespace detail {

struct SimplexOutcome {
    std::array<double, 4> point;
    double value;  // minimised objective, i.e. -loglik
    long iterations;
    bool converged;
};

template <class F>
SimplexOutcome nelder_mead(F&& objective, const std::array<double, 4>& start, const FitOptions& opt) {
    constexpr int dim = 4;
    std::array<std::array<double, 4>, dim + 1> pts;
    std::array<double, dim + 1> vals;
    pts[0] = start;
    for (int i = 0; i < dim; ++i) {
        pts[i + 1] = start;
        pts[i + 1][i] += opt.initial_step;
    }
    for (int i = 0; i <= dim; ++i) vals[i] = objective(pts[i]);

    auto diameter = [&] {
        double d = 0.0;
        for (int i = 0; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
                d = std::max(d, std::sqrt(s));
            }
        return d;
    };
    auto along = [&](const std::array<double, 4>& c, const std::array<double, 4>& w, double t) {
        std::array<double, 4> r;
        for (int k = 0; k < dim; ++k) r[k] = c[k] + t * (w[k] - c[k]);
        return r;
    };

    long it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it) {
        // Order vertices, best first; stable so ties keep their order.
        std::array<int, dim + 1> idx{0, 1, 2, 3, 4};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        auto pts_sorted = pts;
        auto vals_sorted = vals;
        for (int i = 0; i <= dim; ++i) {
            pts_sorted[i] = pts[idx[i]];
            vals_sorted[i] = vals[idx[i]];
        }
        pts = pts_sorted;
        vals = vals_sorted;
        if (diameter() <= opt.diameter_tol) {
            converged = true;
            break;
        }
        std::array<double, 4> centroid{};
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) centroid[k] += pts[i][k] / dim;
        const auto& worst = pts[dim];

        const auto xr = along(centroid, worst, -1.0);
        const double fr = objective(xr);
        if (fr < vals[0]) {
            const auto xe = along(centroid, worst, -2.0);
            const double fe = objective(xe);
            if (fe < fr) {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if (fr < vals[dim - 1]) {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        const bool outside = fr < vals[dim];
        const auto xc = outside ? along(centroid, worst, -0.5) : along(centroid, worst, 0.5);
        const double fc = objective(xc);
        if (fc < (outside ? fr : vals[dim])) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        for (int i = 1; i <= dim; ++i) {
            pts[i] = along(pts[0], pts[i], 0.5);
            vals[i] = objective(pts[i]);
        }
    }
    const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
    return {pts[best], vals[best], it, converged};
}

inline std::array<double, 4> to_log(const BgParams& p) {
    return {std::log(p.alpha_plus()), std::log(p.lambda_plus()), std::log(p.alpha_minus()),
            std::log(p.lambda_minus())};
}

inline BgParams from_log(const std::array<double, 4>& v) {
    return BgParams(std::exp(v[0]), std::exp(v[1]), std::exp(v[2]), std::exp(v[3]));
}

}  // namespace detail

/// Maximum-likelihood fit by Nelder-Mead in log-parameters from several
/// starts: the initial point (moment matching unless given) and
/// opt.starts - 1 Gaussian perturbations of it. The best converged start
/// wins; if none converges the best overall is returned with
/// converged = false. Log-parameters outside [ln 1e-6, ln 1e8] are rejected.
inline FitResult fit_mle(const std::vector<double>& data, std::optional<BgParams> init, RngState& rng,
                         const FitOptions& opt = {}, const EvalPolicy& policy = {}) {
    if (data.size() < 20) throw FitError("fit_mle: need at least 20 data points");
    if (opt.starts < 1) throw FitError("fit_mle: need at least one start");
    const BgParams init_params = init ? *init : moment_match_init(data);
    const LogLikelihoodBatch batch(data, policy);
    const double lo = std::log(1e-6), hi = std::log(1e8);
    auto objective = [&](const std::array<double, 4>& v) {
        for (double c : v)
            if (!(c >= lo && c <= hi)) return std::numeric_limits<double>::infinity();
        try {
            const double ll = batch(detail::from_log(v));
            return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto base = detail::to_log(init_params);
    std::vector<std::array<double, 4>> starts{base};
    for (int s = 1; s < opt.starts; ++s) {
        auto v = base;
        for (double& c : v) c = std::clamp(c + opt.spread * rng.normal(), lo, hi);
        starts.push_back(v);
    }

    int best = -1;
    bool best_converged = false;
    detail::SimplexOutcome best_outcome{};
    for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
        const auto out = detail::nelder_mead(objective, starts[static_cast<std::size_t>(s)], opt);
        // Converged starts beat unconverged ones; ties go to the earlier start.
        const bool better = best < 0 || (out.converged && !best_converged) ||
                            (out.converged == best_converged && out.value < best_outcome.value);
        if (better) {
            best = s;
            best_converged = out.converged;
            best_outcome = out;
        }
    }

    FitResult r{detail::from_log(best_outcome.point), 0.0, best_outcome.iterations, best_converged,
                init_params, best, 0};
    const auto fitted = loglik_detailed(r.params, data, policy);
    const auto initial = loglik_detailed(init_params, data, policy);
    r.log_likelihood = fitted.value;
    r.perturbed_zeros = fitted.perturbed_zeros;
    if (!(fitted.value >= initial.value)) {
        // The batch objective and the exact sum differ by ~1e-12 relative; never
        // report a fit worse than where it started.
        r.params = init_params;
        r.log_likelihood = initial.value;
        r.perturbed_zeros = initial.perturbed_zeros;
    }
    return r;
}

}  // namespace bgamma
