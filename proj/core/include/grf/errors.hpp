#pragma once

#include <stdexcept>
#include <string>

namespace grf {

/// Typed failure reasons surfaced by the library. Grouped into three
/// families that map onto the CLI exit codes: configuration (2),
/// data (3), numerical (4).
enum class ErrorCode {
  // configuration / usage
  InvalidArgument,
  InvalidCutoff,
  InvalidRank,
  InvalidK,
  UnknownChannel,
  DimensionMismatch,
  UnimplementedMethod,
  // data
  MissingFile,
  SchemaViolation,
  DuplicateId,
  NonFiniteValue,
  RaggedRows,
  RateMismatch,
  InsufficientSamples,
  InsufficientPersonalData,
  EmptyDesign,
  NoReferenceFound,
  DegenerateAnchor,
  ImplausibleDrift,
  EmptyOverlap,
  NoStepsFound,
  NoStance,
  TruncatedStance,
  StanceTooShort,
  ZeroRange,
  UndefinedMape,
  AllFoldsInfeasible,
  // numerical
  ConvergenceFailure,
  IllConditionedEmbedding,
  NumericalFailure,
};

const char* to_string(ErrorCode code);

/// Exit-code family of an error: 2 = config, 3 = data, 4 = numerical.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return grf::exit_code(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace grf
