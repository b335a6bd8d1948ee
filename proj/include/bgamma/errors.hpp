#pragma once

#include <stdexcept>
#include <string>

namespace bgamma {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Density evaluated at its pole (x = 0 with alpha+ + alpha- <= 1).
class PoleError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Caller violated a documented precondition of a specialised routine
/// (e.g. an integer-shape formula called with non-integer shape).
class ContractError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A series, continued fraction or quadrature failed to reach its tolerance.
class EvaluationError : public std::runtime_error {
  public:
    EvaluationError(const std::string& what, double partial = 0.0,
                    double last_error = 0.0, long steps = 0)
        : std::runtime_error(what), partial_(partial), last_error_(last_error),
          steps_(steps) {}

    /// Best available partial result at the point of failure.
    double partial() const noexcept { return partial_; }
    double last_error() const noexcept { return last_error_; }
    long steps() const noexcept { return steps_; }

  private:
    double partial_;
    double last_error_;
    long steps_;
};

/// Data unsuitable for fitting (too short, zero variance, non-finite).
class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A reference computation could not be completed. This is a failure of
/// the test machinery, not of the code under test.
class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace bgamma
