#include "hornet/wire.hpp"

#include <cstring>

#include "hornet/error.hpp"

namespace hornet {

std::size_t DataPacket::size() const {
  return (nested() ? kNestedDataHeaderSize : kDataHeaderSize) + payload.size();
}

Bytes encode(const SetupPacket& packet) {
  if (!packet.chdr.is_setup()) {
    throw Error(ErrorCode::kInvalidArgument, "setup packet needs a setup type");
  }
  Bytes out;
  out.reserve(kSetupPacketSize);
  append(out, packet.chdr.serialize());
  append(out, packet.shdr.serialize());
  append(out, packet.payload.bytes);
  append(out, packet.fs_payload.bytes);
  return out;
}

Bytes encode(const DataPacket& packet) {
  if (packet.chdr.is_setup()) {
    throw Error(ErrorCode::kInvalidArgument, "data packet needs a data type");
  }
  if (packet.chdr.nested != packet.nested()) {
    throw Error(ErrorCode::kInvalidArgument, "nested flag disagrees with header size");
  }
  check_payload_size(packet.payload.size());
  Bytes out;
  out.reserve(packet.size());
  append(out, packet.chdr.serialize());
  append(out, packet.iv.bytes);
  std::visit([&](const auto& h) { append(out, h.bytes); }, packet.header);
  append(out, packet.payload);
  return out;
}

Bytes encode(const Packet& packet) {
  return std::visit([](const auto& p) { return encode(p); }, packet);
}

namespace {

SetupPacket decode_setup(const CommonHeader& chdr, ByteSpan bytes) {
  if (bytes.size() < kSetupPacketSize) {
    throw Error(ErrorCode::kTruncatedPacket, std::to_string(bytes.size()) + " byte setup packet");
  }
  if (bytes.size() > kSetupPacketSize) {
    throw Error(ErrorCode::kLengthMismatch, "trailing bytes after setup packet");
  }
  SetupPacket p;
  p.chdr = chdr;
  std::size_t off = kChdrSize;
  p.shdr = SphinxHeader::parse(bytes.subspan(off, kSphinxHeaderSize));
  off += kSphinxHeaderSize;
  std::memcpy(p.payload.bytes.data(), bytes.data() + off, kSphinxPayloadSize);
  off += kSphinxPayloadSize;
  std::memcpy(p.fs_payload.bytes.data(), bytes.data() + off, kFsPayloadSize);
  return p;
}

DataPacket decode_data(const CommonHeader& chdr, ByteSpan bytes) {
  const std::size_t header_end = chdr.nested ? kNestedDataHeaderSize : kDataHeaderSize;
  if (bytes.size() < header_end + kMinPayloadSize) {
    throw Error(ErrorCode::kTruncatedPacket, std::to_string(bytes.size()) + " byte data packet");
  }
  const std::size_t payload_len = bytes.size() - header_end;
  if (payload_len % 16 != 0 || payload_len > kMaxPayloadSize) {
    throw Error(ErrorCode::kLengthMismatch,
                "onion payload of " + std::to_string(payload_len) + " bytes");
  }
  DataPacket p;
  p.chdr = chdr;
  std::memcpy(p.iv.bytes.data(), bytes.data() + kChdrSize, kIvSize);
  const auto* h = bytes.data() + kChdrSize + kIvSize;
  if (chdr.nested) {
    NestedAhdr a;
    std::memcpy(a.bytes.data(), h, a.bytes.size());
    p.header = a;
  } else {
    Ahdr a;
    std::memcpy(a.bytes.data(), h, a.bytes.size());
    p.header = a;
  }
  p.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header_end), bytes.end());
  return p;
}

}  // namespace

Packet decode(ByteSpan bytes) {
  const CommonHeader chdr = CommonHeader::parse(bytes);
  if (chdr.is_setup()) return decode_setup(chdr, bytes);
  return decode_data(chdr, bytes);
}

}  // namespace hornet
