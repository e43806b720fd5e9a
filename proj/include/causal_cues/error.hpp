#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causal_cues {

enum class ErrorCode {
  kMissingFile,
  kRaggedRow,
  kUnparseableCell,
  kCardinalityViolation,
  kMissingValue,
  kUnknownColumn,
  kDuplicateColumn,
  kInvalidArgument,
  kDomainError,
  kOverlappingArguments,
  kDuplicateNode,
  kUnknownNode,
  kNotADag,
  kMissingSepset,
  kNodeSetMismatch,
  kUnresolvedUndirectedEdge,
  kTooManyNodes,
  kDegenerateTreatment,
  kNonBinaryTarget,
  kSingularFit,
  kInvalidSpec,
  kStateSpaceTooLarge,
  kUnknownFixture,
  kMalformedJson,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class CausalError : public std::runtime_error {
 public:
  CausalError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace causal_cues
