#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxstable {

enum class ErrorCode {
  NonPositiveDefinite,
  BadGrid,
  DimensionMismatch,
  ThresholdNonPositive,
  NoExceedance,
  NoRoot,
  NonTermination,
  DomainError,
  BudgetTooSmall,
  EmptyBudget,
  SingularCovariance,
  StencilTooLarge,
  Overflow,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception; callers that need to
// distinguish failure kinds switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maxstable
