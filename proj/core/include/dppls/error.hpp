#pragma once

#include <stdexcept>
#include <string>

namespace dppls {

/// Failure categories surfaced by the library. The CLI maps `Validation`
/// and the domain errors to exit code 2 and everything numeric to 3.
enum class ErrorKind {
  Validation,
  EmptyDesign,
  UnsupportedOrder,
  NotADensity,
  NegativeDensity,
  DegeneratePoint,
  SamplerFailure,
  UnderdeterminedDesign,
  ConditioningFailure,
  SingularDesign,
  Accuracy,
  Numeric,
  Domain,
  EmptyAggregate,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors caused by bad user input rather than by numerics.
  bool is_validation() const noexcept;

 private:
  ErrorKind kind_;
};

/// Thrown when conditioned sampling gives up; carries the best lambda_min
/// observed over all attempts.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double best_lambda_min)
      : Error(ErrorKind::ConditioningFailure, what),
        best_lambda_min_(best_lambda_min) {}

  double best_lambda_min() const noexcept { return best_lambda_min_; }

 private:
  double best_lambda_min_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace dppls
