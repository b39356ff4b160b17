#include "hotda/error.hpp"

namespace hotda {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::ZeroVarianceRow: return "ZeroVarianceRow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ComplexTooLarge: return "ComplexTooLarge";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::MissingGenerators: return "MissingGenerators";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::DegenerateGroups: return "DegenerateGroups";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NotAnMLP: return "NotAnMLP";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
      return ErrorCategory::Config;
    case ErrorCode::ComplexTooLarge:
    case ErrorCode::OracleTooLarge:
      return ErrorCategory::Resource;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hotda
