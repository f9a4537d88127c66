#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsnet {

// Every failure the library reports carries one of these codes. The
// category decides the CLI exit status (config 2, data 3, numerical 4).
enum class ErrorCode {
  // newick
  UnbalancedParentheses,
  DuplicateLeafLabel,
  NegativeBranchLength,
  MissingBranchLength,
  EmptyLabel,
  EmptyTree,
  TooFewTips,
  NewickSyntax,
  UnknownTip,
  // transforms
  DegenerateDistance,
  EmptyGrid,
  InvalidTransform,
  // interactions
  EmptyInput,
  AllColumnsDropped,
  MissingYears,
  InvalidRecord,
  LabelMismatch,
  // model core
  NonPositiveDistance,
  NegativeRate,
  SingleHostColumn,
  // sampler
  InvalidConfig,
  EmptyTrace,
  NonFiniteLogPosterior,
  // evaluate
  InfeasibleFloor,
  EmptyTestSet,
  DegenerateTruth,
  AllZeroDifferences,
  InvalidArgument,
  // io / pipeline
  IoError,
  MissingArtifact,
  Internal,
};

enum class ErrorCategory { Config, Data, Numerical, Internal };

ErrorCategory category_of(ErrorCode code);
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

// Parse failures additionally record the byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, const std::string& message)
      : Error(code, message + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace lsnet
