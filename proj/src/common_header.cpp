#include "hornet/common_header.hpp"

#include "hornet/error.hpp"

namespace hornet {

ByteArray<kChdrSize> CommonHeader::serialize() const {
  ByteArray<kChdrSize> out{};
  out[0] = static_cast<std::uint8_t>(type) | (nested ? kNestedTypeFlag : 0);
  out[1] = hops;
  if (is_setup()) put_u32(out.data() + 2, exp.decaseconds);
  return out;
}

CommonHeader CommonHeader::parse(ByteSpan bytes) {
  if (bytes.size() < kChdrSize) throw Error(ErrorCode::kTruncatedPacket, "common header");
  CommonHeader h;
  const std::uint8_t base = bytes[0] & static_cast<std::uint8_t>(~kNestedTypeFlag);
  h.nested = (bytes[0] & kNestedTypeFlag) != 0;
  if (base < 0x01 || base > 0x04) {
    throw Error(ErrorCode::kUnknownType, "packet type byte " + std::to_string(bytes[0]));
  }
  h.type = static_cast<PacketType>(base);
  if (h.nested && h.is_setup()) {
    throw Error(ErrorCode::kUnknownType, "setup packets cannot be nested");
  }
  h.hops = bytes[1];
  if (h.hops != kMaxHops) {
    throw Error(ErrorCode::kLengthMismatch, "hop count " + std::to_string(h.hops));
  }
  if (h.is_setup()) {
    h.exp.decaseconds = get_u32(bytes.data() + 2);
    if (bytes[6] != 0 || bytes[7] != 0) {
      throw Error(ErrorCode::kLengthMismatch, "nonzero reserved bytes in setup header");
    }
  } else {
    for (std::size_t i = 2; i < kChdrSize; ++i) {
      if (bytes[i] != 0) throw Error(ErrorCode::kLengthMismatch, "nonzero reserved bytes in data header");
    }
  }
  return h;
}

}  // namespace hornet
