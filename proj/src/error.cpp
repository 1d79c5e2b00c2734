#include "grf/error.hpp"

namespace grf {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kChildCountsMismatch: return "child-counts-mismatch";
    case ErrorCode::kAllZeroImportance: return "all-zero-importance";
    case ErrorCode::kGammaOutOfRange: return "gamma-out-of-range";
    case ErrorCode::kMtryExceedsFeatures: return "mtry-exceeds-features";
    case ErrorCode::kFeatureCountMismatch: return "feature-count-mismatch";
    case ErrorCode::kMissingWeights: return "missing-weights";
    case ErrorCode::kEmptySelection: return "empty-selection";
    case ErrorCode::kLambdaLengthMismatch: return "lambda-length-mismatch";
    case ErrorCode::kLambdaOutOfRange: return "lambda-out-of-range";
    case ErrorCode::kClassTooSmall: return "class-too-small";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kMissingValue: return "missing-value-error";
    case ErrorCode::kSingleClass: return "single-class-error";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kModelFormat: return "model-format-error";
  }
  return "unknown-error";
}

}  // namespace grf
