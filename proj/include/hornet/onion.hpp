#pragma once

#include <cstdint>
#include <span>

#include "hornet/crypto_kit.hpp"

namespace hornet {

struct Iv {
  ByteArray<kIvSize> bytes{};
  auto operator<=>(const Iv&) const = default;
};

struct LayerResult {
  Bytes payload;
  Iv iv;
};

// O' = ENC(h_ENC(s); IV; O), IV' = PRP(h_PRP(s); IV).
LayerResult add_layer(const SymKey& key, const Iv& iv, ByteSpan payload);

// Exact inverse of add_layer: IV' = PRP^-1(h_PRP(s); IV), then O is
// decrypted under IV'.
LayerResult remove_layer(const SymKey& key, const Iv& iv, ByteSpan payload);

// In-place variants used on the forwarding path.
void add_layer_inplace(const SymKey& key, Iv& iv, MutableByteSpan payload);
void remove_layer_inplace(const SymKey& key, Iv& iv, MutableByteSpan payload);

// Source side of the forward path: layers keys[l-1] .. keys[0] around
// `plaintext`, starting from `initial_iv`. Returns O_0 and IV_0.
LayerResult wrap_forward(std::span<const SymKey> keys, const Iv& initial_iv, ByteSpan plaintext);

// What the forward path does to a wrapped payload, one remove per hop.
LayerResult unwrap_forward(std::span<const SymKey> keys, const Iv& iv, ByteSpan payload);

// Source side of the backward path: undoes the backward nodes' layers (in
// reverse path order) and then the destination's layer.
Bytes unwrap_backward(std::span<const SymKey> backward_keys, const SymKey& dest_key,
                      const Iv& final_iv, ByteSpan payload);

// End-to-end plaintext block inside every onion payload:
//   seq(8) || e2e-mac(16) || data(P - 26) || length(2)
// The top bit of `length` marks a control block (it carries a header rather
// than application bytes). The MAC covers everything but itself plus a
// direction byte.
inline constexpr std::size_t kBlockOverhead = 8 + kMacSize + 2;
inline constexpr std::size_t kMinPayloadSize = 32;
inline constexpr std::size_t kMaxPayloadSize = 4096;

enum class FlowDirection : std::uint8_t { kForward = 0x0f, kBackward = 0xb0 };

struct PlaintextBlock {
  std::uint64_t seq = 0;
  bool control = false;
  Bytes data;
};

// Throws kPayloadTooLarge when data exceeds payload_size - 26 bytes and
// kInvalidArgument for an unusable payload_size.
Bytes seal_block(const SymKey& mac_key, FlowDirection direction, const PlaintextBlock& block,
                 std::size_t payload_size);

// Throws kE2eMacMismatch on any modification.
PlaintextBlock open_block(const SymKey& mac_key, FlowDirection direction, ByteSpan sealed);

void check_payload_size(std::size_t payload_size);

}  // namespace hornet
