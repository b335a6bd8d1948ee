#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bgamma/density.hpp"
#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/specfun/hypergeometric.hpp"

namespace bgamma {

/// Sum of ln f over a fixed data set, for many parameter vectors.
///
/// On each half-line ln f(x) = C + (a - 1) ln x - l x + ln J(z), z = x (l+ + l-),
/// where J is the scaled Whittaker function. The first terms reduce to
/// precomputed sums over the data; ln J is smooth in ln z, so it is
/// interpolated by Chebyshev panels in ln z below the asymptotic switch and
/// evaluated directly above it. Relative agreement with summing log_pdf is
/// around 1e-12.
class LogLikelihoodBatch {
  public:
    explicit LogLikelihoodBatch(const std::vector<double>& data, EvalPolicy policy = {})
        : policy_(policy) {
        double scale = 0.0;
        for (double x : data) {
            if (!std::isfinite(x)) throw DomainError("loglik: data must be finite");
            scale = std::max(scale, std::abs(x));
            if (x > 0.0)
                plus_.add(x);
            else if (x < 0.0)
                minus_.add(-x);
            else
                ++zeros_;
        }
        plus_.finish();
        minus_.finish();
        zero_stand_in_ = 1e-12 * (scale > 0.0 ? scale : 1.0);
    }

    /// Number of exact zeros; they are replaced by +1e-12 * max|x| when the
    /// density has a pole at 0.
    long zero_count() const noexcept { return zeros_; }

    double operator()(const BgParams& p) const {
        double total = side_sum(p, plus_) + side_sum(p.reflected(), minus_);
        if (zeros_ > 0) {
            const double at_zero = p.shape_sum() > 1.0 ? log_pdf_at_zero(p)
                                                       : log_pdf(p, zero_stand_in_, policy_);
            total += static_cast<double>(zeros_) * at_zero;
        }
        return total;
    }

  private:
    static constexpr int nodes_ = 18;
    static constexpr double panel_width_ = 1.25;
    static constexpr double max_span_ = 40.0;

    struct Side {
        std::vector<double> x;      // sorted ascending
        std::vector<double> log_x;
        double sum_x = 0.0;
        double sum_log_x = 0.0;
        void add(double v) { x.push_back(v); }
        void finish() {
            std::sort(x.begin(), x.end());
            log_x.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                log_x[i] = std::log(x[i]);
                sum_x += x[i];
                sum_log_x += log_x[i];
            }
        }
    };

    double log_j(double lam, double mu, double z) const {
        return std::log(specfun::whittaker_w_scaled(lam, mu, z, policy_));
    }

    double side_sum(const BgParams& q, const Side& side) const {
        const std::size_t n = side.x.size();
        if (n == 0) return 0.0;
        const double ap = q.alpha_plus();
        const double am = q.alpha_minus();
        const double lam = 0.5 * (ap - am);
        const double mu = 0.5 * (ap + am - 1.0);
        const double log_ls = std::log(q.rate_sum());
        double total = static_cast<double>(n) * detail::log_positive_prefactor(q) +
                       (ap - 1.0) * side.sum_log_x - q.lambda_plus() * side.sum_x;

        try {
            const double u_cap = std::log(policy_.asymptotic_switch_z());
            const double u_min = side.log_x.front() + log_ls;
            const double u_max = std::min(side.log_x.back() + log_ls, u_cap);
            const double u_lo = std::max(u_min, u_max - max_span_);
            std::size_t i = 0;
            // Points too close to zero for the panel grid.
            for (; i < n && side.log_x[i] + log_ls < u_lo; ++i)
                total += log_j(lam, mu, side.x[i] * q.rate_sum());
            if (u_max > u_lo) {
                const int panels = std::max(1, static_cast<int>(std::ceil((u_max - u_lo) / panel_width_)));
                const double width = (u_max - u_lo) / panels;
                std::vector<double> coef(nodes_);
                for (int k = 0; k < panels && i < n; ++k) {
                    const double a = u_lo + width * k;
                    const double b = k + 1 == panels ? u_max : a + width;
                    if (side.log_x[i] + log_ls > b) continue;
                    fit_panel(lam, mu, a, b, coef);
                    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                    for (; i < n; ++i) {
                        const double u = side.log_x[i] + log_ls;
                        if (u > b) break;
                        total += clenshaw(coef, (u - mid) / half);
                    }
                }
            }
            for (; i < n; ++i) total += log_j(lam, mu, side.x[i] * q.rate_sum());
        } catch (const EvaluationError&) {
            // Slow but robust: fall back to the full dispatch (with its own
            // quadrature fallback) for every point.
            total = 0.0;
            for (double x : side.x) total += detail::log_pdf_positive(q, x, policy_).log_value;
        }
        return total;
    }

    void fit_panel(double lam, double mu, double a, double b, std::vector<double>& coef) const {
        const double pi = 3.14159265358979323846;
        double values[nodes_];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < nodes_; ++k) {
            const double t = std::cos(pi * (k + 0.5) / nodes_);
            values[k] = log_j(lam, mu, std::exp(mid + half * t));
        }
        for (int j = 0; j < nodes_; ++j) {
            double s = 0.0;
            for (int k = 0; k < nodes_; ++k) s += values[k] * std::cos(pi * j * (k + 0.5) / nodes_);
            coef[j] = 2.0 * s / nodes_;
        }
        coef[0] *= 0.5;
    }

    static double clenshaw(const std::vector<double>& c, double t) {
        double b1 = 0.0, b2 = 0.0;
        for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) {
            const double b0 = 2.0 * t * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }

    EvalPolicy policy_;
    Side plus_;
    Side minus_;
    long zeros_ = 0;
    double zero_stand_in_ = 0.0;
};

}  // namespace bgamma
