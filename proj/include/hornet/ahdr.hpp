#pragma once

#include <compare>
#include <span>

#include "hornet/forwarding_state.hpp"

namespace hornet {

// FS(32) || gamma(16) || beta((r-1)c). 336 bytes for r = 7.
struct Ahdr {
  static constexpr std::size_t kSize = kAhdrSize;
  ByteArray<kSize> bytes{};

  ForwardingSegment fs() const;
  ByteSpan gamma() const { return ByteSpan(bytes).subspan(kFsSize, kMacSize); }
  ByteSpan beta() const { return ByteSpan(bytes).subspan(kBlockSize); }

  auto operator<=>(const Ahdr&) const = default;
};

// Same layout with a (2r-1)c beta; carries an inner Ahdr for the last hop.
struct NestedAhdr {
  static constexpr std::size_t kSize = kNestedAhdrSize;
  ByteArray<kSize> bytes{};

  ForwardingSegment fs() const;

  auto operator<=>(const NestedAhdr&) const = default;
};

template <typename Header>
struct HeaderStep {
  SymKey key;
  RoutingSegment route;
  ExpiryTime exp;
  Header next;
};

using AhdrStep = HeaderStep<Ahdr>;
using NestedAhdrStep = HeaderStep<NestedAhdr>;

// keys[i], fses[i] belong to the i-th node on the path. Padding bytes come
// from `rng`. Throws kInvalidArgument unless 1 <= l <= r and sizes match.
Ahdr create_ahdr(std::span<const SymKey> keys, std::span<const ForwardingSegment> fses,
                 Rng& rng);

// Errors: kPadCheckFailed (fs_open), kMacMismatch, kSessionExpired when
// now >= EXP.
AhdrStep proc_ahdr(const SymKey& sv, const Ahdr& header, ExpiryTime now);
AhdrStep proc_ahdr(const FsSealer& sealer, const Ahdr& header, ExpiryTime now);

NestedAhdr create_nested_ahdr(std::span<const SymKey> keys,
                              std::span<const ForwardingSegment> fses, const Ahdr& inner,
                              Rng& rng);

NestedAhdrStep proc_nested_ahdr(const SymKey& sv, const NestedAhdr& header, ExpiryTime now);
NestedAhdrStep proc_nested_ahdr(const FsSealer& sealer, const NestedAhdr& header,
                                ExpiryTime now);

// The leading 336 bytes; equals the embedded header once the last hop of the
// outer path has processed it.
Ahdr inner_ahdr(const NestedAhdr& header);

// Header bytes after the transformation applied by hop `hop`, computed
// without any node secret. Endpoints use this to recognise the header that
// arrives at the end of a backward path.
Ahdr advance_ahdr(const Ahdr& header, const SymKey& hop_key);

}  // namespace hornet
