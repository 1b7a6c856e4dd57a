#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mindchat {

enum class ErrorCode {
  kUnsupportedCharacter,
  kInvalidConfig,
  kSampleRateTooLow,
  kInvalidBandCount,
  kDegenerateInput,
  kShapeMismatch,
  kModelMismatch,
  kMissingTemplates,
  kInsufficientTrainingData,
  kSingularScatter,
  kSingularCovariance,
  kEmptySet,
  kUnparseable,
  kInconsistentState,
  kEmptySlotSelected,
  kAlreadyFinalized,
  kStaleSuggestions,
  kStuckState,
  kUnsupportedUtterance,
  kSchemaError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (CLI, service, bindings) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mindchat
