#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grf {

enum class ErrorCode {
  kChildCountsMismatch,
  kAllZeroImportance,
  kGammaOutOfRange,
  kMtryExceedsFeatures,
  kFeatureCountMismatch,
  kMissingWeights,
  kEmptySelection,
  kLambdaLengthMismatch,
  kLambdaOutOfRange,
  kClassTooSmall,
  kLengthMismatch,
  kEmptyInput,
  kParseError,
  kMissingValue,
  kSingleClass,
  kInvalidArgument,
  kIoError,
  kModelFormat,
};

std::string_view error_code_name(ErrorCode code);

// All surfaced failures in the library are reported as this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace grf
