#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bgamma/density.hpp"
#include "bgamma/distribution.hpp"
#include "bgamma/oracle.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/rng.hpp"

namespace bgamma::oracle {

/// Parameter sets exercising every density branch, from the two-sided
/// exponential to a fitted high-rate set.
inline std::vector<BgParams> reference_parameter_sets() {
    return {BgParams(1, 1, 1, 1),       BgParams(2, 1, 1, 1),
            BgParams(3, 2, 0.5, 1),     BgParams(0.5, 1, 0.5, 1),
            BgParams(1.55, 133.96, 0.94, 88.92), BgParams(0.7, 2, 1.3, 3)};
}

struct VerifyOptions {
    std::vector<BgParams> params = reference_parameter_sets();
    double threshold_scale = 1.0;  // multiplies every threshold
    std::size_t fft_size = 65536;
    std::size_t mc_draws = 1000000;
    std::uint64_t seed = 1;
    EvalPolicy policy{};
};

/// pdf against the convolution-quadrature oracle on 11 points per side,
/// x = +-k/(2 lambda) for k = 1..11 with lambda the rate on that side.
inline OracleReport verify_pdf_quadrature(const VerifyOptions& opt) {
    OracleReport r;
    r.target = "pdf_quadrature";
    r.rel_threshold = 1e-7 * opt.threshold_scale;
    for (const auto& p : opt.params)
        for (int k = 1; k <= 11; ++k)
            for (double x : {0.5 * k / p.lambda_plus(), -0.5 * k / p.lambda_minus()}) {
                const double got = pdf(p, x, opt.policy);
                const double want = pdf_quadrature_oracle(p, x);
                r.max_abs_err = std::max(r.max_abs_err, std::abs(got - want));
                r.max_rel_err = std::max(r.max_rel_err, std::abs(got - want) / want);
                r.grid.push_back(x);
            }
    r.finish();
    return r;
}

/// pdf(1,1,1,1) against exp(-|x|)/2 on 50 points in [-10, 10].
inline OracleReport verify_laplace(const VerifyOptions& opt) {
    OracleReport r;
    r.target = "laplace";
    r.rel_threshold = 1e-12 * opt.threshold_scale;
    const BgParams p(1, 1, 1, 1);
    for (int i = 0; i < 50; ++i) {
        const double x = -10.0 + 20.0 * (i + 0.5) / 50.0;
        const double got = pdf(p, x, opt.policy);
        const double want = 0.5 * std::exp(-std::abs(x));
        r.max_abs_err = std::max(r.max_abs_err, std::abs(got - want));
        r.max_rel_err = std::max(r.max_rel_err, std::abs(got - want) / want);
        r.grid.push_back(x);
    }
    r.finish();
    return r;
}

/// Equal-shape densities against the Variance Gamma formula, alpha in
/// {0.5, 1, 2.5}, 20 points.
inline OracleReport verify_vg(const VerifyOptions& opt) {
    OracleReport r;
    r.target = "vg";
    r.rel_threshold = 1e-8 * opt.threshold_scale;
    for (double a : {0.5, 1.0, 2.5}) {
        const BgParams p(a, 1.5, a, 0.8);
        const VgParams vg = vg_params(p);
        for (int i = 0; i < 20; ++i) {
            const double x = -6.0 + 12.0 * (i + 0.5) / 20.0;
            const double got = pdf(p, x, opt.policy);
            const double want = vg_pdf(vg, x, opt.policy);
            r.max_abs_err = std::max(r.max_abs_err, std::abs(got - want));
            r.max_rel_err = std::max(r.max_rel_err, std::abs(got - want) / want);
            r.grid.push_back(x);
        }
    }
    r.finish();
    return r;
}

/// Fourier inversion against pdf on the central 99% of the mass, for the
/// parameter sets with alpha+ + alpha- > 1.
inline OracleReport verify_pdf_fft(const VerifyOptions& opt) {
    OracleReport r;
    r.target = "pdf_fft";
    r.abs_threshold = 1e-5 * opt.threshold_scale;
    for (const auto& p : opt.params) {
        if (!(p.shape_sum() > 1.0)) continue;
        const auto g = pdf_fft_oracle(p, opt.fft_size, default_fft_halfwidth(p));
        const double lo = quantile(p, 0.005, opt.policy);
        const double hi = quantile(p, 0.995, opt.policy);
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double x = g.x[j];
            if (x < lo || x > hi) continue;
            const double got = pdf(p, x, opt.policy);
            const double err = std::abs(got - g.density[j]);
            r.max_abs_err = std::max(r.max_abs_err, err);
            if (got > 0.0) r.max_rel_err = std::max(r.max_rel_err, err / got);
        }
        r.grid.push_back(lo);
        r.grid.push_back(hi);
    }
    r.finish();
    return r;
}

/// Table moments against Monte Carlo estimates. max_rel_err here is the
/// largest |estimate - table| in units of the jackknife standard error.
inline OracleReport verify_moments(const VerifyOptions& opt) {
    OracleReport r;
    r.target = "moments";
    r.rel_threshold = 3.0 * opt.threshold_scale;
    RngState rng(opt.seed);
    for (const auto& p : opt.params) {
        const MomentSet m = moments(p);
        const MomentEstimate e = mc_moment_oracle(p, opt.mc_draws, rng);
        const double diffs[4] = {e.mean - m.mean, e.variance - m.variance, e.skewness - m.skewness,
                                 e.kurtosis - m.kurtosis};
        const double ses[4] = {e.se_mean, e.se_variance, e.se_skewness, e.se_kurtosis};
        for (int k = 0; k < 4; ++k) {
            r.max_abs_err = std::max(r.max_abs_err, std::abs(diffs[k]));
            r.max_rel_err = std::max(r.max_rel_err, std::abs(diffs[k]) / ses[k]);
        }
        r.grid.push_back(p.alpha_plus());
    }
    r.finish();
    return r;
}

inline std::vector<std::string> verification_targets() {
    return {"pdf_quadrature", "laplace", "vg", "pdf_fft", "moments"};
}

inline OracleReport run_verification(const std::string& target, const VerifyOptions& opt) {
    if (target == "pdf_quadrature") return verify_pdf_quadrature(opt);
    if (target == "laplace") return verify_laplace(opt);
    if (target == "vg") return verify_vg(opt);
    if (target == "pdf_fft") return verify_pdf_fft(opt);
    if (target == "moments") return verify_moments(opt);
    throw ContractError("unknown verification target: " + target);
}

}  // namespace bgamma::oracle
