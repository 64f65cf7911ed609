#include "hornet/onion.hpp"

#include <cstring>

#include "hornet/error.hpp"

namespace hornet {

namespace {

constexpr SubkeyLabel kLayerLabels[] = {SubkeyLabel::kEnc, SubkeyLabel::kPrp};

}  // namespace

void add_layer_inplace(const SymKey& key, Iv& iv, MutableByteSpan payload) {
  SymKey sub[2];
  crypto::derive_subkeys(key, kLayerLabels, sub);
  crypto::stream_xcrypt_inplace(sub[0], iv.bytes, payload);
  crypto::prp_wide_inplace(sub[1], iv.bytes, PrpDirection::kForward);
}

void remove_layer_inplace(const SymKey& key, Iv& iv, MutableByteSpan payload) {
  SymKey sub[2];
  crypto::derive_subkeys(key, kLayerLabels, sub);
  crypto::prp_wide_inplace(sub[1], iv.bytes, PrpDirection::kInverse);
  crypto::stream_xcrypt_inplace(sub[0], iv.bytes, payload);
}

LayerResult add_layer(const SymKey& key, const Iv& iv, ByteSpan payload) {
  LayerResult out{Bytes(payload.begin(), payload.end()), iv};
  add_layer_inplace(key, out.iv, out.payload);
  return out;
}

LayerResult remove_layer(const SymKey& key, const Iv& iv, ByteSpan payload) {
  LayerResult out{Bytes(payload.begin(), payload.end()), iv};
  remove_layer_inplace(key, out.iv, out.payload);
  return out;
}

LayerResult wrap_forward(std::span<const SymKey> keys, const Iv& initial_iv, ByteSpan plaintext) {
  if (keys.empty() || keys.size() > kMaxHops) {
    throw Error(ErrorCode::kInvalidArgument, "path length must be in [1, r]");
  }
  LayerResult out{Bytes(plaintext.begin(), plaintext.end()), initial_iv};
  for (std::size_t i = keys.size(); i-- > 0;) add_layer_inplace(keys[i], out.iv, out.payload);
  return out;
}

LayerResult unwrap_forward(std::span<const SymKey> keys, const Iv& iv, ByteSpan payload) {
  LayerResult out{Bytes(payload.begin(), payload.end()), iv};
  for (const SymKey& k : keys) remove_layer_inplace(k, out.iv, out.payload);
  return out;
}

Bytes unwrap_backward(std::span<const SymKey> backward_keys, const SymKey& dest_key,
                      const Iv& final_iv, ByteSpan payload) {
  Bytes data(payload.begin(), payload.end());
  Iv iv = final_iv;
  for (std::size_t j = backward_keys.size(); j-- > 0;) {
    remove_layer_inplace(backward_keys[j], iv, data);
  }
  remove_layer_inplace(dest_key, iv, data);
  return data;
}

void check_payload_size(std::size_t payload_size) {
  if (payload_size < kMinPayloadSize || payload_size > kMaxPayloadSize ||
      payload_size % 16 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "payload size " + std::to_string(payload_size) +
                    " must be a multiple of 16 in [32, 4096]");
  }
}

namespace {

constexpr std::uint16_t kControlBit = 0x8000;

Tag block_mac(const SymKey& mac_key, FlowDirection direction, ByteSpan sealed) {
  Bytes input;
  input.reserve(sealed.size() - kMacSize + 1);
  input.push_back(static_cast<std::uint8_t>(direction));
  append(input, sealed.first(8));
  append(input, sealed.subspan(8 + kMacSize));
  return crypto::mac(mac_key, input);
}

}  // namespace

Bytes seal_block(const SymKey& mac_key, FlowDirection direction, const PlaintextBlock& block,
                 std::size_t payload_size) {
  check_payload_size(payload_size);
  const std::size_t capacity = payload_size - kBlockOverhead;
  if (block.data.size() > capacity) {
    throw Error(ErrorCode::kPayloadTooLarge, std::to_string(block.data.size()) +
                                                 " bytes exceed block capacity " +
                                                 std::to_string(capacity));
  }
  Bytes out(payload_size, 0);
  put_u64(out.data(), block.seq);
  std::memcpy(out.data() + 8 + kMacSize, block.data.data(), block.data.size());
  std::uint16_t length = static_cast<std::uint16_t>(block.data.size());
  if (block.control) length |= kControlBit;
  put_u16(out.data() + payload_size - 2, length);
  const Tag t = block_mac(mac_key, direction, out);
  std::memcpy(out.data() + 8, t.data(), kMacSize);
  return out;
}

PlaintextBlock open_block(const SymKey& mac_key, FlowDirection direction, ByteSpan sealed) {
  if (sealed.size() < kMinPayloadSize) {
    throw Error(ErrorCode::kE2eMacMismatch, "block shorter than its framing");
  }
  const Tag expect = block_mac(mac_key, direction, sealed);
  if (!crypto::tag_equal(expect, sealed.subspan(8, kMacSize))) {
    throw Error(ErrorCode::kE2eMacMismatch, "end-to-end MAC check failed");
  }
  const std::uint16_t length = get_u16(sealed.data() + sealed.size() - 2);
  const std::size_t n = length & ~kControlBit;
  if (n > sealed.size() - kBlockOverhead) {
    throw Error(ErrorCode::kE2eMacMismatch, "authenticated length field out of range");
  }
  PlaintextBlock out;
  out.seq = get_u64(sealed.data());
  out.control = (length & kControlBit) != 0;
  const auto* data = sealed.data() + 8 + kMacSize;
  out.data.assign(data, data + n);
  return out;
}

}  // namespace hornet
