#include "ssel/errors.hpp"

namespace ssel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DegenerateNoise: return "DegenerateNoise";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateSensor: return "DuplicateSensor";
    case ErrorCode::SingularFIM: return "SingularFIM";
    case ErrorCode::UnderSampled: return "UnderSampled";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroData: return "ZeroData";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InconsistentGrid: return "InconsistentGrid";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::BadFoldCount: return "BadFoldCount";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankOutOfRange:
    case ErrorCode::UnderSampled:
    case ErrorCode::InfeasibleBudget:
    case ErrorCode::TooLarge:
    case ErrorCode::BadFoldCount:
      return ErrorCategory::Usage;
    case ErrorCode::NumericalFailure:
    case ErrorCode::DegenerateNoise:
    case ErrorCode::SingularFIM:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace ssel
