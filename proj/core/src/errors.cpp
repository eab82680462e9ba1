#include "grf/errors.hpp"

namespace grf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidCutoff: return "invalid-cutoff";
    case ErrorCode::InvalidRank: return "invalid-rank";
    case ErrorCode::InvalidK: return "invalid-k";
    case ErrorCode::UnknownChannel: return "unknown-channel";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::UnimplementedMethod: return "unimplemented-method";
    case ErrorCode::MissingFile: return "missing-file";
    case ErrorCode::SchemaViolation: return "schema-violation";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::NonFiniteValue: return "non-finite-value";
    case ErrorCode::RaggedRows: return "ragged-rows";
    case ErrorCode::RateMismatch: return "rate-mismatch";
    case ErrorCode::InsufficientSamples: return "insufficient-samples";
    case ErrorCode::InsufficientPersonalData: return "insufficient-personal-data";
    case ErrorCode::EmptyDesign: return "empty-design";
    case ErrorCode::NoReferenceFound: return "no-reference-found";
    case ErrorCode::DegenerateAnchor: return "degenerate-anchor";
    case ErrorCode::ImplausibleDrift: return "implausible-drift";
    case ErrorCode::EmptyOverlap: return "empty-overlap";
    case ErrorCode::NoStepsFound: return "no-steps-found";
    case ErrorCode::NoStance: return "no-stance";
    case ErrorCode::TruncatedStance: return "truncated-stance";
    case ErrorCode::StanceTooShort: return "stance-too-short";
    case ErrorCode::ZeroRange: return "zero-range";
    case ErrorCode::UndefinedMape: return "undefined-mape";
    case ErrorCode::AllFoldsInfeasible: return "all-folds-infeasible";
    case ErrorCode::ConvergenceFailure: return "convergence-failure";
    case ErrorCode::IllConditionedEmbedding: return "ill-conditioned-embedding";
    case ErrorCode::NumericalFailure: return "numerical-failure";
  }
  return "unknown-error";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidCutoff:
    case ErrorCode::InvalidRank:
    case ErrorCode::InvalidK:
    case ErrorCode::UnknownChannel:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::UnimplementedMethod:
      return 2;
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::IllConditionedEmbedding:
    case ErrorCode::NumericalFailure:
      return 4;
    default:
      return 3;
  }
}

}  // namespace grf
