#pragma once

#include <stdexcept>
#include <string>

namespace stbddc {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kStructurallySingular,
  kNumericallySingular,
  kNonPositiveCellSize,
  kInvalidPartition,
  kSingularBlock,
  kSingularSchur,
  kSingularCoarse,
  kSizeCapExceeded,
  kNoConvergence,
  kPicardStalled,
  kConfig,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kStructurallySingular: return "StructurallySingular";
    case ErrorCode::kNumericallySingular: return "NumericallySingular";
    case ErrorCode::kNonPositiveCellSize: return "NonPositiveCellSize";
    case ErrorCode::kInvalidPartition: return "InvalidPartition";
    case ErrorCode::kSingularBlock: return "SingularBlock";
    case ErrorCode::kSingularSchur: return "SingularSchur";
    case ErrorCode::kSingularCoarse: return "SingularCoarse";
    case ErrorCode::kSizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kPicardStalled: return "PicardStalled";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace stbddc
