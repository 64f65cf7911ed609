#include "hornet/error.hpp"

namespace hornet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidElement: return "InvalidElement";
    case ErrorCode::kPadCheckFailed: return "PadCheckFailed";
    case ErrorCode::kMacMismatch: return "MacMismatch";
    case ErrorCode::kTagMismatch: return "TagMismatch";
    case ErrorCode::kSessionExpired: return "SessionExpired";
    case ErrorCode::kInvalidRoute: return "InvalidRoute";
    case ErrorCode::kInvalidExpiry: return "InvalidExpiry";
    case ErrorCode::kPathTooLong: return "PathTooLong";
    case ErrorCode::kPayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::kE2eMacMismatch: return "E2eMacMismatch";
    case ErrorCode::kReplayDetected: return "ReplayDetected";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kTruncatedPacket: return "TruncatedPacket";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kValidation: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace hornet
