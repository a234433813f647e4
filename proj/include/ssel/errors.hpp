#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssel {

enum class ErrorCode {
  RankOutOfRange,
  NumericalFailure,
  DegenerateNoise,
  IndexOutOfRange,
  DuplicateSensor,
  SingularFIM,
  UnderSampled,
  DimensionMismatch,
  ZeroData,
  InfeasibleBudget,
  TooLarge,
  DimensionError,
  ParseError,
  InconsistentGrid,
  EmptyMask,
  BadFoldCount,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Broad failure class, used by the CLI to pick an exit status.
enum class ErrorCategory { Usage, Data, Numerical };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ssel
