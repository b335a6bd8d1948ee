#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "bgamma/density.hpp"
#include "bgamma/distribution.hpp"
#include "bgamma/oracle.hpp"

using namespace bgamma;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

BgParams random_params(std::mt19937_64& gen, double lo = 0.2, double hi = 5.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return {std::exp(u(gen)), std::exp(u(gen)), std::exp(u(gen)), std::exp(u(gen))};
}

// Integral of the density over one half-line piece [0, b] (or [b, 0]),
// by tanh-sinh so the integrable endpoint behaviour at 0 is handled.
double half_mass(const BgParams& p, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double x) { return x == 0.0 ? 0.0 : pdf(p, x); };
    // In w = |x|^(1/q) the pole |x|^(s-1) becomes integrable without a
    // singularity once q >= 1/s.
    const double q = std::max(1.0, 2.0 / p.shape_sum());
    const double sign = b < 0 ? -1.0 : 1.0;
    const double wmax = std::pow(std::abs(b), 1.0 / q);
    auto g = [&](double w) {
        if (w <= 0.0) return 0.0;
        return f(sign * std::pow(w, q)) * q * std::pow(w, q - 1.0);
    };
    return ts.integrate(g, 0.0, wmax, 1e-12);
}

}  // namespace

TEST(BgParams, Validation) {
    EXPECT_THROW(BgParams(0.0, 1, 1, 1), DomainError);
    EXPECT_THROW(BgParams(1, -1, 1, 1), DomainError);
    EXPECT_THROW(BgParams(1, 1, INFINITY, 1), DomainError);
    EXPECT_THROW(BgParams(1, 1, 1, NAN), DomainError);
    const BgParams p(1.5, 2, 0.5, 3);
    EXPECT_EQ(p.reflected(), BgParams(0.5, 3, 1.5, 2));
    EXPECT_EQ(p.reflected().reflected(), p);
}

TEST(Branch, Selection) {
    EXPECT_EQ(select_branch(BgParams(2, 1, 0.3, 1)), DensityBranch::IntegerShape);
    EXPECT_EQ(select_branch(BgParams(2, 1, 2, 3)), DensityBranch::IntegerShape);
    EXPECT_EQ(select_branch(BgParams(0.5, 1, 0.5, 3)), DensityBranch::EqualAlphaBessel);
    EXPECT_EQ(select_branch(BgParams(0.5, 1, 0.5 + 1e-13, 3)), DensityBranch::EqualAlphaBessel);
    EXPECT_EQ(select_branch(BgParams(0.5, 1, 0.5 + 1e-9, 3)), DensityBranch::WhittakerGeneral);
    EXPECT_EQ(select_branch(BgParams(3.0 + 5e-13, 1, 0.2, 1)), DensityBranch::IntegerShape);
    // The negative axis dispatches on the reflected parameters.
    EXPECT_EQ(select_branch(BgParams(0.3, 1, 2, 1), -1.0), DensityBranch::IntegerShape);
    EXPECT_EQ(select_branch(BgParams(0.3, 1, 2, 1), 1.0), DensityBranch::WhittakerGeneral);
}

TEST(Pdf, Laplace) {
    const BgParams p(1, 1, 1, 1);
    EXPECT_NEAR(pdf(p, 0.7), 0.5 * std::exp(-0.7), 1e-16);
    for (double x : {-20.0, -3.0, -0.1, 1e-9, 0.5, 4.0, 30.0})
        EXPECT_LT(rel_err(pdf(p, x), 0.5 * std::exp(-std::abs(x))), 1e-14) << x;
    EXPECT_LT(rel_err(pdf(p, 0.0), 0.5), 1e-14);
}

TEST(Pdf, IntegerShapeExamples) {
    const BgParams p(2, 1, 1, 1);
    EXPECT_LT(rel_err(pdf(p, 0.5), 0.5 * std::exp(-0.5)), 1e-14);
    for (int i = 1; i <= 10; ++i) {
        const double x = 0.4 * i;
        const double closed = 0.5 * (x + 0.5) * std::exp(-x);
        EXPECT_LT(rel_err(pdf_integer_shape(p, x), closed), 1e-14) << x;
        EXPECT_LT(rel_err(oracle::pdf_quadrature_oracle(p, x), closed), 1e-11) << x;
    }
    const BgParams q(3, 2, 0.5, 1);
    EXPECT_LT(rel_err(pdf_integer_shape(q, 1.0), oracle::pdf_quadrature_oracle(q, 1.0)), 1e-11);
    EXPECT_THROW(pdf_integer_shape(BgParams(2.5, 1, 1, 1), 1.0), ContractError);
}

TEST(Pdf, EqualAlphaExamples) {
    EXPECT_LT(rel_err(pdf_equal_alpha(BgParams(1, 1, 1, 1), -2.0), 0.5 * std::exp(-2.0)), 1e-14);
    const BgParams p(0.5, 1, 0.5, 1);
    EXPECT_LT(rel_err(pdf_equal_alpha(p, 0.2), oracle::pdf_quadrature_oracle(p, 0.2)), 1e-11);
    EXPECT_THROW(pdf_equal_alpha(BgParams(0.5, 1, 0.6, 1), 0.2), ContractError);
}

TEST(Pdf, FittedStockParameters) {
    const BgParams p(1.55, 133.96, 0.94, 88.92);
    for (double x : {-0.05, -0.01, -1e-4, 1e-4, 0.01, 0.05})
        EXPECT_LT(rel_err(pdf(p, x), oracle::pdf_quadrature_oracle(p, x)), 1e-9) << x;
}

TEST(Pdf, ZeroHandling) {
    EXPECT_THROW(pdf(BgParams(0.5, 1, 0.5, 1), 0.0), PoleError);
    EXPECT_THROW(pdf(BgParams(0.4, 1, 0.6, 2), 0.0), PoleError);
    // f(0) = int_0^inf g+(y) g-(y) dy with g the two Gamma densities.
    boost::math::quadrature::exp_sinh<double> es;
    for (const BgParams& p : {BgParams(0.7, 1, 0.6, 2), BgParams(2, 1, 1, 1), BgParams(1.55, 133.96, 0.94, 88.92)}) {
        auto g = [&](double y) {
            if (y <= 0.0) return 0.0;
            const double ap = p.alpha_plus(), am = p.alpha_minus();
            return std::exp(ap * std::log(p.lambda_plus()) + am * std::log(p.lambda_minus()) +
                            (ap + am - 2.0) * std::log(y) - p.rate_sum() * y - std::lgamma(ap) -
                            std::lgamma(am));
        };
        EXPECT_LT(rel_err(pdf(p, 0.0), es.integrate(g, 0.0, INFINITY, 1e-13)), 1e-10);
        // Continuity from both sides.
        EXPECT_LT(rel_err(pdf(p, 1e-12 / p.rate_sum()), pdf(p, 0.0)), 1e-2);
        EXPECT_LT(rel_err(pdf(p, -1e-12 / p.rate_sum()), pdf(p, 0.0)), 1e-2);
    }
    EXPECT_THROW(pdf(BgParams(1, 1, 1, 1), NAN), DomainError);
    EXPECT_EQ(pdf(BgParams(1, 1, 1, 1), INFINITY), 0.0);
}

TEST(Pdf, LogSpaceSurvivesUnderflow) {
    const BgParams p(1.55, 133.96, 0.94, 88.92);
    const double lp = log_pdf(p, 20.0);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, -2000.0);
    EXPECT_EQ(pdf(p, 20.0), 0.0);
    // Slope between two far points approaches -lambda+.
    const double slope = (log_pdf(p, 21.0) - lp) / 1.0;
    EXPECT_NEAR(slope, -133.96, 0.1);
}

TEST(Pdf, SymmetryIsExact) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const BgParams p = random_params(gen);
        const double x = ux(gen);
        EXPECT_EQ(pdf(p, x), pdf(p.reflected(), -x));
    }
}

TEST(Pdf, BranchAgreement) {
    const std::vector<BgParams> sets = {BgParams(2, 1.3, 2, 0.7), BgParams(1, 2, 1, 0.5),
                                        BgParams(3, 1, 3, 1)};
    const double offsets[] = {-3, -1, -0.5, -0.1, 0.1, 0.5, 1, 3};
    for (const auto& p : sets)
        for (double o : offsets) {
            const double x = o / (0.5 * p.rate_sum());
            const BgParams& q = x > 0 ? p : p.reflected();
            const double ax = std::abs(x);
            const double ref = pdf_quadrature(q, ax);
            EXPECT_LT(rel_err(pdf_integer_shape(q, ax), ref), 1e-7);
            EXPECT_LT(rel_err(pdf_equal_alpha(q, ax), ref), 1e-7);
            EXPECT_LT(rel_err(pdf_whittaker(q, ax), ref), 1e-7);
        }
    // Integer alpha+ without equal alphas, and the general branch.
    for (const BgParams& p : {BgParams(2, 1, 0.3, 2), BgParams(0.7, 2, 1.3, 3), BgParams(4, 0.5, 1.7, 0.8)})
        for (double o : offsets) {
            const double x = o / (0.5 * p.rate_sum());
            const BgParams& q = x > 0 ? p : p.reflected();
            const double ax = std::abs(x);
            EXPECT_LT(rel_err(pdf(p, x), pdf_quadrature(q, ax)), 1e-7);
            EXPECT_LT(rel_err(pdf_whittaker(q, ax), pdf_quadrature(q, ax)), 1e-7);
        }
}

TEST(Pdf, Positivity) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const BgParams p = random_params(gen);
        const double x = ux(gen) / p.rate_sum();
        if (x == 0.0) continue;
        const double v = pdf(p, x);
        ASSERT_GE(v, 0.0);
        ASSERT_TRUE(std::isfinite(v));
    }
}

TEST(Pdf, ScalingLaw) {
    const std::vector<BgParams> sets = {BgParams(1.55, 133.96, 0.94, 88.92), BgParams(0.7, 2, 1.3, 3),
                                        BgParams(2, 1, 1, 1), BgParams(0.4, 1, 0.4, 2)};
    for (const auto& p : sets)
        for (double c : {0.5, 2.0, 10.0})
            for (double o : {-2.0, -0.3, 0.2, 1.5}) {
                const double x = o / (0.5 * p.rate_sum());
                EXPECT_LT(rel_err(c * pdf(scale(p, c), c * x), pdf(p, x)), 1e-9);
            }
}

TEST(Pdf, Normalization) {
    std::mt19937_64 gen(3);
    int checked = 0;
    while (checked < 15) {
        const BgParams p = random_params(gen);
        if (p.shape_sum() <= 1.0) continue;
        ++checked;
        const double mass =
            half_mass(p, -40.0 / p.lambda_minus()) + half_mass(p, 40.0 / p.lambda_plus());
        EXPECT_NEAR(mass, 1.0, 1e-7) << p.alpha_plus() << " " << p.lambda_plus() << " "
                                     << p.alpha_minus() << " " << p.lambda_minus();
    }
    // Pole cases, integrated in a power substitution on each side.
    for (const BgParams& p : {BgParams(0.3, 1, 0.4, 2), BgParams(0.5, 1, 0.5, 1), BgParams(0.2, 3, 0.25, 0.5)}) {
        const double mass =
            half_mass(p, -40.0 / p.lambda_minus()) + half_mass(p, 40.0 / p.lambda_plus());
        EXPECT_NEAR(mass, 1.0, 1e-7);
    }
}

TEST(Derivative, Examples) {
    const BgParams sym(1.7, 2, 1.7, 2);
    for (double x : {0.1, 0.8, 3.0}) EXPECT_NEAR(pdf_derivative(sym, x), -pdf_derivative(sym, -x), 1e-15);
    EXPECT_NEAR(pdf_derivative(BgParams(2, 1, 1, 1), 0.5), 0.0, 1e-15);
    EXPECT_THROW(pdf_derivative(sym, 0.0), DomainError);
}

TEST(Derivative, FiniteDifference) {
    const double h = 1e-5;
    for (const BgParams& p : {BgParams(2, 1, 1, 1), BgParams(0.7, 2, 1.3, 3), BgParams(3, 2, 0.5, 1),
                              BgParams(1.5, 1, 1.5, 2), BgParams(1, 1, 0.6, 1)})
        for (double x : {-1.0, 1.0, 2.5}) {
            const double fd = (pdf(p, x + h) - pdf(p, x - h)) / (2 * h);
            EXPECT_LT(rel_err(pdf_derivative(p, x), fd), 1e-6) << x;
        }
}

TEST(Derivative, AtZero) {
    EXPECT_NEAR(f_prime_at_zero(BgParams(2, 1, 2, 1)), 0.0, 1e-16);
    const double h = 1e-5;
    for (const BgParams& p : {BgParams(3, 1, 2, 1), BgParams(2, 3, 2, 1), BgParams(2.5, 1, 3.5, 2)}) {
        const double fd = (pdf(p, h) - pdf(p, -h)) / (2 * h);
        EXPECT_LT(rel_err(f_prime_at_zero(p), fd), 1e-5);
    }
    EXPECT_GT(f_prime_at_zero(BgParams(3, 1, 2, 1)), 0.0);
    EXPECT_LT(f_prime_at_zero(BgParams(2, 3, 2, 1)), 0.0);
    EXPECT_THROW(f_prime_at_zero(BgParams(1, 1, 2, 1)), ContractError);
    EXPECT_THROW(f_prime_at_zero(BgParams(2, 1, 0.9, 1)), ContractError);
}
