#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "hornet/crypto_kit.hpp"

namespace hornet {

// Where a node sends the packet next. Serialized as
// next_hop(4) || egress_link(2) || flags(2), big-endian.
struct RoutingSegment {
  static constexpr std::uint16_t kDestinationFlag = 0x0001;

  std::uint32_t next_hop = 0;
  std::uint16_t egress_link = 0;
  std::uint16_t flags = 0;

  bool is_destination() const { return (flags & kDestinationFlag) != 0; }

  ByteArray<kRoutingSegmentSize> serialize() const;
  // Throws kPadCheckFailed if reserved flag bits are set.
  static RoutingSegment parse(ByteSpan bytes);

  auto operator<=>(const RoutingSegment&) const = default;
};

// Expiration time in units of 10 seconds since the epoch.
struct ExpiryTime {
  std::uint32_t decaseconds = 0;

  static ExpiryTime from_seconds(std::uint64_t seconds) {
    return {static_cast<std::uint32_t>(seconds / 10)};
  }
  auto operator<=>(const ExpiryTime&) const = default;
};

struct ForwardingSegment {
  ByteArray<kFsSize> sealed{};
  auto operator<=>(const ForwardingSegment&) const = default;
};

struct FsPayload {
  ByteArray<kFsPayloadSize> bytes{};
  auto operator<=>(const FsPayload&) const = default;
};

struct OpenedSegment {
  SymKey key;
  RoutingSegment route;
  ExpiryTime exp;
};

// Plaintext key(16) || R(8) || EXP(4) || 0^4, sealed with PRP(h_PRP(sv)).
ForwardingSegment fs_create(const SymKey& sv, const SymKey& key, const RoutingSegment& route,
                            ExpiryTime exp);

// Throws kPadCheckFailed when the zero pad or reserved flags are nonzero,
// which is what a wrong SV or a modified FS looks like.
OpenedSegment fs_open(const SymKey& sv, const ForwardingSegment& fs);

// fs_create/fs_open for one SV with the sealing key schedule built once.
class FsSealer {
 public:
  explicit FsSealer(const SymKey& sv);

  const SymKey& sv() const { return sv_; }
  ForwardingSegment create(const SymKey& key, const RoutingSegment& route, ExpiryTime exp) const;
  OpenedSegment open(const ForwardingSegment& fs) const;

 private:
  SymKey sv_;
  crypto::WidePrp prp_;
};

FsPayload init_fs_payload(const SymKey& seed_key);

FsPayload add_fs(const SymKey& key, const ForwardingSegment& fs, const FsPayload& in);

// Recovers the FSes inserted by `hop_keys.size()` nodes, in insertion order.
// `seed_key` is the key the payload was initialised with. On a failed MAC
// throws kMacMismatch with layer() set to the offending hop index.
std::vector<ForwardingSegment> retrieve_fses(const FsPayload& payload, const SymKey& seed_key,
                                             std::span<const SymKey> hop_keys);

}  // namespace hornet
