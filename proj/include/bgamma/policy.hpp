#pragma once

#include <cmath>

#include "bgamma/errors.hpp"

namespace bgamma {

/// Accuracy knobs shared by the special-function kernel and everything
/// built on it. Immutable once constructed.
class EvalPolicy {
  public:
    static constexpr double default_rel_tol = 1e-13;
    static constexpr long default_max_terms = 1000;
    static constexpr double default_quad_abs_tol = 1e-300;
    static constexpr double default_asymptotic_switch_z = 50.0;

    EvalPolicy() = default;

    EvalPolicy(double rel_tol, long max_terms, double quad_abs_tol,
               double asymptotic_switch_z)
        : rel_tol_(rel_tol), max_terms_(max_terms), quad_abs_tol_(quad_abs_tol),
          asymptotic_switch_z_(asymptotic_switch_z) {
        if (!(rel_tol > 0.0 && rel_tol < 1e-3))
            throw DomainError("EvalPolicy: rel_tol must lie in (0, 1e-3)");
        if (max_terms < 100)
            throw DomainError("EvalPolicy: max_terms must be at least 100");
        if (!(quad_abs_tol >= 0.0) || !std::isfinite(quad_abs_tol))
            throw DomainError("EvalPolicy: quad_abs_tol must be finite and >= 0");
        if (!(asymptotic_switch_z > 0.0))
            throw DomainError("EvalPolicy: asymptotic_switch_z must be positive");
    }

    double rel_tol() const noexcept { return rel_tol_; }
    long max_terms() const noexcept { return max_terms_; }
    double quad_abs_tol() const noexcept { return quad_abs_tol_; }
    double asymptotic_switch_z() const noexcept { return asymptotic_switch_z_; }

    EvalPolicy with_rel_tol(double v) const {
        return {v, max_terms_, quad_abs_tol_, asymptotic_switch_z_};
    }
    EvalPolicy with_asymptotic_switch_z(double v) const {
        return {rel_tol_, max_terms_, quad_abs_tol_, v};
    }

  private:
    double rel_tol_ = default_rel_tol;
    long max_terms_ = default_max_terms;
    double quad_abs_tol_ = default_quad_abs_tol;
    double asymptotic_switch_z_ = default_asymptotic_switch_z;
};

}  // namespace bgamma
