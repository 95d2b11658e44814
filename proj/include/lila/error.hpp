#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lila {

enum class ErrorCode {
  kOutOfRange,
  kCalibrationMismatch,
  kUnknownLabelId,
  kShapeMismatch,
  kEmptyDataset,
  kLengthMismatch,
  kAllUndefined,
  kBadMagic,
  kTruncatedFile,
  kVersionUnsupported,
  kTooFewSequences,
  kKExceedsN,
  kInvalidArgument,
  kIoError,
  kParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Single exception type for the library; `code()` discriminates the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kCalibrationMismatch: return "CalibrationMismatch";
    case ErrorCode::kUnknownLabelId: return "UnknownLabelId";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAllUndefined: return "AllUndefined";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTooFewSequences: return "TooFewSequences";
    case ErrorCode::kKExceedsN: return "KExceedsN";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace lila
