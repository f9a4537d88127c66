#include "lsnet/error.hpp"

namespace lsnet {

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGrid:
    case ErrorCode::InvalidTransform:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Config;
    case ErrorCode::NegativeRate:
    case ErrorCode::NonFiniteLogPosterior:
    case ErrorCode::NonPositiveDistance:
    case ErrorCode::DegenerateDistance:
      return ErrorCategory::Numerical;
    case ErrorCode::Internal:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Data;
  }
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedParentheses: return "UnbalancedParentheses";
    case ErrorCode::DuplicateLeafLabel: return "DuplicateLeafLabel";
    case ErrorCode::NegativeBranchLength: return "NegativeBranchLength";
    case ErrorCode::MissingBranchLength: return "MissingBranchLength";
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::EmptyTree: return "EmptyTree";
    case ErrorCode::TooFewTips: return "TooFewTips";
    case ErrorCode::NewickSyntax: return "NewickSyntax";
    case ErrorCode::UnknownTip: return "UnknownTip";
    case ErrorCode::DegenerateDistance: return "DegenerateDistance";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidTransform: return "InvalidTransform";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AllColumnsDropped: return "AllColumnsDropped";
    case ErrorCode::MissingYears: return "MissingYears";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::SingleHostColumn: return "SingleHostColumn";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::NonFiniteLogPosterior: return "NonFiniteLogPosterior";
    case ErrorCode::InfeasibleFloor: return "InfeasibleFloor";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace lsnet
