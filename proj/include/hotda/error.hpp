#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hotda {

enum class ErrorCode {
  // ingest
  DimensionTooSmall,
  ZeroVarianceRow,
  ParseError,
  InvariantViolation,
  NotSymmetric,
  EntryOutOfRange,
  NonzeroDiagonal,
  TooFewPoints,
  // filtration / persistence
  ComplexTooLarge,
  OracleTooLarge,
  MissingGenerators,
  // vectorize
  LayoutMismatch,
  // stats
  DegenerateGroups,
  // classify
  SingleClassTraining,
  DimensionMismatch,
  TooFewSamples,
  NotAnMLP,
  // plumbing
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exit-code category used by the command line tool.
enum class ErrorCategory { Config, Data, Resource };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hotda
