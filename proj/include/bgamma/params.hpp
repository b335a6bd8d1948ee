#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "bgamma/errors.hpp"

namespace bgamma {

/// Parameters (alpha+, lambda+, alpha-, lambda-) of the law of X - Y with
/// X ~ Gamma(alpha+, lambda+) and Y ~ Gamma(alpha-, lambda-) independent.
/// Shapes are dimensionless, rates carry inverse x-units.
class BgParams {
  public:
    BgParams(double alpha_plus, double lambda_plus, double alpha_minus,
             double lambda_minus)
        : alpha_plus_(alpha_plus), lambda_plus_(lambda_plus),
          alpha_minus_(alpha_minus), lambda_minus_(lambda_minus) {
        check(alpha_plus, "alpha_plus");
        check(lambda_plus, "lambda_plus");
        check(alpha_minus, "alpha_minus");
        check(lambda_minus, "lambda_minus");
    }

    double alpha_plus() const noexcept { return alpha_plus_; }
    double lambda_plus() const noexcept { return lambda_plus_; }
    double alpha_minus() const noexcept { return alpha_minus_; }
    double lambda_minus() const noexcept { return lambda_minus_; }

    double shape_sum() const noexcept { return alpha_plus_ + alpha_minus_; }
    double rate_sum() const noexcept { return lambda_plus_ + lambda_minus_; }

    /// Parameters of -X: the roles of the two sides are exchanged.
    BgParams reflected() const noexcept {
        BgParams r = *this;
        std::swap(r.alpha_plus_, r.alpha_minus_);
        std::swap(r.lambda_plus_, r.lambda_minus_);
        return r;
    }

    friend bool operator==(const BgParams&, const BgParams&) = default;

  private:
    static void check(double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string("BgParams: ") + name +
                              " must be positive and finite");
    }

    double alpha_plus_;
    double lambda_plus_;
    double alpha_minus_;
    double lambda_minus_;
};

namespace detail {

inline constexpr double integer_tolerance = 1e-12;

/// Positive integer within `integer_tolerance`, or 0 when not integral.
inline long as_positive_integer(double v) noexcept {
    const double r = std::round(v);
    if (r >= 1.0 && std::abs(v - r) <= integer_tolerance && r < 1e9)
        return static_cast<long>(r);
    return 0;
}

inline bool is_integral(double v) noexcept {
    return std::abs(v - std::round(v)) <= integer_tolerance;
}

}  // namespace detail

}  // namespace bgamma
