#include "hornet/forwarding_state.hpp"

#include <cstring>

#include "hornet/error.hpp"

namespace hornet {

ByteArray<kRoutingSegmentSize> RoutingSegment::serialize() const {
  ByteArray<kRoutingSegmentSize> out;
  put_u32(out.data(), next_hop);
  put_u16(out.data() + 4, egress_link);
  put_u16(out.data() + 6, flags);
  return out;
}

RoutingSegment RoutingSegment::parse(ByteSpan bytes) {
  if (bytes.size() != kRoutingSegmentSize) {
    throw Error(ErrorCode::kInvalidArgument, "routing segment must be 8 bytes");
  }
  RoutingSegment r;
  r.next_hop = get_u32(bytes.data());
  r.egress_link = get_u16(bytes.data() + 4);
  r.flags = get_u16(bytes.data() + 6);
  if ((r.flags & ~kDestinationFlag) != 0) {
    throw Error(ErrorCode::kPadCheckFailed, "reserved routing flag bits set");
  }
  return r;
}

FsSealer::FsSealer(const SymKey& sv)
    : sv_(sv), prp_(crypto::derive_subkey(sv, SubkeyLabel::kPrp)) {}

ForwardingSegment FsSealer::create(const SymKey& key, const RoutingSegment& route,
                                   ExpiryTime exp) const {
  ForwardingSegment fs;
  std::uint8_t* p = fs.sealed.data();
  std::memcpy(p, key.bytes.data(), kKeySize);
  const auto r = route.serialize();
  std::memcpy(p + kKeySize, r.data(), r.size());
  put_u32(p + kKeySize + kRoutingSegmentSize, exp.decaseconds);
  // trailing four bytes stay zero
  prp_.apply(fs.sealed, PrpDirection::kForward);
  return fs;
}

OpenedSegment FsSealer::open(const ForwardingSegment& fs) const {
  ByteArray<kFsSize> plain = fs.sealed;
  prp_.apply(plain, PrpDirection::kInverse);
  const std::uint8_t* p = plain.data();
  constexpr std::size_t kPadOffset = kKeySize + kRoutingSegmentSize + 4;
  for (std::size_t i = kPadOffset; i < kFsSize; ++i) {
    if (p[i] != 0) throw Error(ErrorCode::kPadCheckFailed, "forwarding segment pad is nonzero");
  }
  OpenedSegment out;
  std::memcpy(out.key.bytes.data(), p, kKeySize);
  out.route = RoutingSegment::parse(ByteSpan(p + kKeySize, kRoutingSegmentSize));
  out.exp.decaseconds = get_u32(p + kKeySize + kRoutingSegmentSize);
  return out;
}

ForwardingSegment fs_create(const SymKey& sv, const SymKey& key, const RoutingSegment& route,
                            ExpiryTime exp) {
  return FsSealer(sv).create(key, route, exp);
}

OpenedSegment fs_open(const SymKey& sv, const ForwardingSegment& fs) {
  return FsSealer(sv).open(fs);
}

FsPayload init_fs_payload(const SymKey& seed_key) {
  FsPayload p;
  crypto::prg_into(crypto::derive_subkey(seed_key, SubkeyLabel::kPrg1), PrgVariant::k1, p.bytes);
  return p;
}

FsPayload add_fs(const SymKey& key, const ForwardingSegment& fs, const FsPayload& in) {
  ByteArray<kFsPayloadSize> stream;
  crypto::prg_into(crypto::derive_subkey(key, SubkeyLabel::kPrg0), PrgVariant::k0, stream);

  FsPayload out;
  std::uint8_t* body = out.bytes.data() + kMacSize;
  std::memcpy(body, fs.sealed.data(), kFsSize);
  std::memcpy(body + kFsSize, in.bytes.data(), (kMaxHops - 1) * kBlockSize);
  xor_into(MutableByteSpan(body, kFsPayloadSize - kMacSize),
           ByteSpan(stream.data() + kMacSize, kFsPayloadSize - kMacSize));

  const Tag alpha = crypto::mac(crypto::derive_subkey(key, SubkeyLabel::kMac),
                                ByteSpan(body, kFsPayloadSize - kMacSize));
  std::memcpy(out.bytes.data(), alpha.data(), kMacSize);
  return out;
}

std::vector<ForwardingSegment> retrieve_fses(const FsPayload& payload, const SymKey& seed_key,
                                             std::span<const SymKey> hop_keys) {
  const std::size_t l = hop_keys.size();
  if (l < 1 || l > kMaxHops) {
    throw Error(ErrorCode::kInvalidArgument, "path length must be in [1, r]");
  }
  constexpr std::size_t c = kBlockSize;
  constexpr std::size_t rc = kFsPayloadSize;

  std::vector<ByteArray<rc>> streams(l);
  for (std::size_t i = 0; i < l; ++i) {
    crypto::prg_into(crypto::derive_subkey(hop_keys[i], SubkeyLabel::kPrg0), PrgVariant::k0,
                     streams[i]);
  }

  // Rebuild the trailing blocks each hop dropped: the tail of the initial
  // payload, pushed right by every insertion and XORed with the part of
  // each hop's stream that covered it.
  const FsPayload initial = init_fs_payload(seed_key);
  Bytes full(rc + l * c);
  std::memcpy(full.data(), payload.bytes.data(), rc);
  std::uint8_t* tail = full.data() + rc;
  std::memcpy(tail, initial.bytes.data() + (kMaxHops - l) * c, l * c);
  for (std::size_t j = 0; j + 1 < l; ++j) {
    const std::size_t from = (kMaxHops - l + 1 + j) * c;
    xor_into(MutableByteSpan(tail, rc - from), ByteSpan(streams[j].data() + from, rc - from));
  }

  std::vector<ForwardingSegment> out(l);
  std::size_t offset = 0;
  for (std::size_t step = l; step-- > 0;) {
    std::uint8_t* cur = full.data() + offset;
    const Tag expect = crypto::mac(crypto::derive_subkey(hop_keys[step], SubkeyLabel::kMac),
                                   ByteSpan(cur + kMacSize, rc - kMacSize));
    if (!crypto::tag_equal(expect, ByteSpan(cur, kMacSize))) {
      throw Error(ErrorCode::kMacMismatch,
                  "FS payload MAC check failed at hop " + std::to_string(step),
                  static_cast<int>(step));
    }
    xor_into(MutableByteSpan(cur, rc), streams[step]);
    std::memcpy(out[step].sealed.data(), cur + kMacSize, kFsSize);
    offset += c;
  }
  return out;
}

}  // namespace hornet
