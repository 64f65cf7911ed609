#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace hornet {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidElement,
  kPadCheckFailed,
  kMacMismatch,
  kTagMismatch,
  kSessionExpired,
  kInvalidRoute,
  kInvalidExpiry,
  kPathTooLong,
  kPayloadTooLarge,
  kE2eMacMismatch,
  kReplayDetected,
  kUnknownSession,
  kTruncatedPacket,
  kUnknownType,
  kLengthMismatch,
  kValidation,
};

const char* error_code_name(ErrorCode code);

// Every failure surfaced by the library. `layer` is set for errors that can
// be attributed to a specific onion layer (retrieve_fses MAC failures).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<int> layer = std::nullopt)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code),
        layer_(layer) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> layer() const noexcept { return layer_; }

 private:
  ErrorCode code_;
  std::optional<int> layer_;
};

}  // namespace hornet
