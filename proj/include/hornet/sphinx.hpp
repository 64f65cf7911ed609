#pragma once

// Setup-phase mix format: a per-hop re-randomised group element, an onion
// routing block with a MAC per hop (also covering the common header), and a
// fixed-size payload that end hosts use to pass one confidential blob.

#include <span>
#include <vector>

#include "hornet/common_header.hpp"

namespace hornet {

inline constexpr std::size_t kSphinxBetaSize = kMaxHops * kBlockSize;  // 336
inline constexpr std::size_t kSphinxHeaderSize = kGroupElementSize + kSphinxBetaSize + kMacSize;
inline constexpr std::size_t kSphinxPayloadSize = 416;
// tag(16) || length(2) || inner
inline constexpr std::size_t kSphinxPayloadCapacity = kSphinxPayloadSize - kMacSize - 2;

struct SphinxHeader {
  GroupElement y;
  ByteArray<kSphinxBetaSize> beta{};
  Tag gamma{};

  ByteArray<kSphinxHeaderSize> serialize() const;
  static SphinxHeader parse(ByteSpan bytes);
  bool operator==(const SphinxHeader&) const = default;
};

struct SphinxPayload {
  ByteArray<kSphinxPayloadSize> bytes{};
  bool operator==(const SphinxPayload&) const = default;
};

struct SetupKeys {
  std::vector<SymKey> forward;
  std::vector<SymKey> backward;
};

struct PathHop {
  GroupElement public_key;
  RoutingSegment route;
};

// Session bootstrap input: the source's ephemeral secret plus node public
// keys and routing for both paths. The destination is the last forward hop.
struct BootstrapInput {
  Scalar source_secret;
  std::vector<PathHop> forward;
  std::vector<PathHop> backward;
};

struct SphinxHeaders {
  SphinxHeader forward;
  SphinxHeader backward;
  SetupKeys keys;
  // Group element the backward header carries after its last hop; the
  // source recognises the returning setup packet by it.
  GroupElement backward_final_y;
};

// Forward MACs bind `chdr` with type kSetupForward, backward MACs bind it
// with type kSetupBackward. Throws kPathTooLong / kInvalidElement.
SphinxHeaders gen_sphx_hdr(const BootstrapInput& input, const CommonHeader& chdr, Rng& rng);

struct SphinxStep {
  SphinxHeader header;
  SphinxPayload payload;
  SymKey key;
  RoutingSegment route;
};

// Throws kInvalidElement or kMacMismatch.
SphinxStep proc_sphx_pkt(const SphinxHeader& header, const SphinxPayload& payload,
                         const Scalar& node_secret, const CommonHeader& chdr);

SphinxPayload gen_sphx_pl_send(std::span<const SymKey> forward_keys, ByteSpan inner);
Bytes unwrap_sphx_pl_send(const SymKey& dest_key, const SphinxPayload& payload);
SphinxPayload gen_sphx_pl_recv(const SymKey& dest_key, ByteSpan inner);
Bytes unwrap_sphx_pl_recv(std::span<const SymKey> backward_keys, const SymKey& dest_key,
                          const SphinxPayload& payload);

}  // namespace hornet
