#pragma once

#include <cstdint>

#include "hornet/forwarding_state.hpp"

namespace hornet {

enum class PacketType : std::uint8_t {
  kSetupForward = 0x01,
  kSetupBackward = 0x02,
  kDataForward = 0x03,
  kDataBackward = 0x04,
};

inline constexpr std::uint8_t kNestedTypeFlag = 0x80;

// type(1) || hops(1) || specific(6)
//   setup: EXP(4) || 0^2
//   data:  0^6 (the IV travels as its own field after the common header)
struct CommonHeader {
  PacketType type = PacketType::kSetupForward;
  bool nested = false;  // data packets only: 672-byte header follows
  std::uint8_t hops = static_cast<std::uint8_t>(kMaxHops);
  ExpiryTime exp{};     // setup packets only

  bool is_setup() const {
    return type == PacketType::kSetupForward || type == PacketType::kSetupBackward;
  }

  ByteArray<kChdrSize> serialize() const;
  // Throws kTruncatedPacket, kUnknownType, or kLengthMismatch (hop count or
  // reserved bytes that do not match the type).
  static CommonHeader parse(ByteSpan bytes);

  bool operator==(const CommonHeader&) const = default;
};

}  // namespace hornet
