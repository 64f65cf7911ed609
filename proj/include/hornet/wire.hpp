#pragma once

// Byte layouts on the wire (all integers big-endian):
//
//   setup: chdr(8) || sphinx header(384) || sphinx payload(416) || FS payload(336)
//   data:  chdr(8) || iv(16) || ahdr(336, or 672 when nested) || onion payload
//
// The onion payload length is fixed per session, a multiple of 16 in
// [32, 4096].

#include <variant>

#include "hornet/ahdr.hpp"
#include "hornet/onion.hpp"
#include "hornet/sphinx.hpp"

namespace hornet {

inline constexpr std::size_t kSetupPacketSize =
    kChdrSize + kSphinxHeaderSize + kSphinxPayloadSize + kFsPayloadSize;  // 1144
inline constexpr std::size_t kDataHeaderSize = kChdrSize + kIvSize + kAhdrSize;  // 360
inline constexpr std::size_t kNestedDataHeaderSize = kChdrSize + kIvSize + kNestedAhdrSize;
// Table 2 counts 8 + 3rs = 344 header bytes; the 16-byte IV is not part of
// that figure.
inline constexpr std::size_t kPaperDataHeaderSize = kChdrSize + kAhdrSize;

struct SetupPacket {
  CommonHeader chdr;
  SphinxHeader shdr;
  SphinxPayload payload;
  FsPayload fs_payload;

  bool operator==(const SetupPacket&) const = default;
};

struct DataPacket {
  CommonHeader chdr{PacketType::kDataForward};
  Iv iv;
  std::variant<Ahdr, NestedAhdr> header;
  Bytes payload;

  bool nested() const { return std::holds_alternative<NestedAhdr>(header); }
  std::size_t size() const;

  bool operator==(const DataPacket&) const = default;
};

using Packet = std::variant<SetupPacket, DataPacket>;

Bytes encode(const SetupPacket& packet);
// Throws kInvalidArgument if chdr.nested disagrees with the header variant
// or the payload size is unusable.
Bytes encode(const DataPacket& packet);
Bytes encode(const Packet& packet);

// Never reads past `bytes`. Errors: kTruncatedPacket, kUnknownType,
// kLengthMismatch.
Packet decode(ByteSpan bytes);

}  // namespace hornet
