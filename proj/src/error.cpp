#include "mindchat/error.hpp"

namespace mindchat {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedCharacter: return "UnsupportedCharacter";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kSampleRateTooLow: return "SampleRateTooLow";
    case ErrorCode::kInvalidBandCount: return "InvalidBandCount";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kMissingTemplates: return "MissingTemplates";
    case ErrorCode::kInsufficientTrainingData: return "InsufficientTrainingData";
    case ErrorCode::kSingularScatter: return "SingularScatter";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kUnparseable: return "Unparseable";
    case ErrorCode::kInconsistentState: return "InconsistentState";
    case ErrorCode::kEmptySlotSelected: return "EmptySlotSelected";
    case ErrorCode::kAlreadyFinalized: return "AlreadyFinalized";
    case ErrorCode::kStaleSuggestions: return "StaleSuggestions";
    case ErrorCode::kStuckState: return "StuckState";
    case ErrorCode::kUnsupportedUtterance: return "UnsupportedUtterance";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mindchat
