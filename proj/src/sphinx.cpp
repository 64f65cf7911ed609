#include "hornet/sphinx.hpp"

#include <cstring>

#include "hornet/error.hpp"

namespace hornet {
namespace {

constexpr std::size_t c = kBlockSize;
constexpr std::size_t kStreamSize = kSphinxBetaSize + c;  // (r+1)c

struct HopSecrets {
  SymKey session;  // s_i, handed to HORNET
  SymKey sphinx;   // keys the header MAC and routing-block stream
  Scalar blind;
};

HopSecrets hop_secrets(const GroupElement& y, const GroupElement& shared) {
  HopSecrets out;
  out.session = crypto::hash_to_key("hornet/setup/session-key", shared.bytes);
  out.sphinx = crypto::hash_to_key("hornet/setup/sphinx-key", shared.bytes);
  ByteArray<2 * kGroupElementSize> both;
  std::memcpy(both.data(), y.bytes.data(), kGroupElementSize);
  std::memcpy(both.data() + kGroupElementSize, shared.bytes.data(), kGroupElementSize);
  out.blind = crypto::hash_to_scalar("hornet/setup/blind", both);
  return out;
}

ByteArray<kStreamSize> routing_stream(const SymKey& sphinx_key) {
  ByteArray<kStreamSize> s;
  crypto::prg_into(crypto::derive_subkey(sphinx_key, SubkeyLabel::kPrg0), PrgVariant::k0, s);
  return s;
}

Tag header_mac(const SymKey& sphinx_key, ByteSpan beta, const CommonHeader& chdr) {
  Bytes input(beta.begin(), beta.end());
  const auto ch = chdr.serialize();
  append(input, ch);
  return crypto::mac(crypto::derive_subkey(sphinx_key, SubkeyLabel::kMac), input);
}

CommonHeader with_type(CommonHeader chdr, PacketType type) {
  chdr.type = type;
  chdr.nested = false;
  return chdr;
}

// Builds the header for one path; returns it, the per-hop session keys and
// the group element left after the last hop.
struct PathHeader {
  SphinxHeader header;
  std::vector<SymKey> keys;
  GroupElement final_y;
};

PathHeader build_path_header(const Scalar& ephemeral, std::span<const PathHop> path,
                             const CommonHeader& chdr, Rng& rng) {
  const std::size_t l = path.size();
  if (l < 1) throw Error(ErrorCode::kInvalidArgument, "empty path");
  if (l > kMaxHops) throw Error(ErrorCode::kPathTooLong, "path has " + std::to_string(l) + " hops");

  std::vector<HopSecrets> secrets;
  secrets.reserve(l);
  Scalar acc = ephemeral;
  GroupElement y = crypto::public_from_secret(acc);
  PathHeader out;
  out.header.y = y;
  for (std::size_t i = 0; i < l; ++i) {
    const GroupElement shared = crypto::dh(acc, path[i].public_key);
    secrets.push_back(hop_secrets(y, shared));
    acc = crypto::scalar_mul(acc, secrets.back().blind);
    y = crypto::public_from_secret(acc);
    out.keys.push_back(secrets.back().session);
  }
  out.final_y = y;

  std::vector<ByteArray<kStreamSize>> streams;
  streams.reserve(l);
  for (const auto& s : secrets) streams.push_back(routing_stream(s.sphinx));

  // Filler: what the dropped tail blocks turn into after i hops.
  Bytes phi;
  for (std::size_t i = 1; i < l; ++i) {
    phi.resize(i * c, 0);
    const std::size_t from = kStreamSize - i * c;
    xor_into(phi, ByteSpan(streams[i - 1].data() + from, i * c));
  }

  auto block_for = [&](std::size_t i, const Tag& next_gamma) {
    ByteArray<c> block{};
    const auto r = path[i].route.serialize();
    std::memcpy(block.data(), r.data(), r.size());
    std::memcpy(block.data() + kRoutingSegmentSize, next_gamma.data(), kMacSize);
    return block;
  };

  Bytes beta(kSphinxBetaSize);
  {
    const std::size_t head = (kMaxHops - l + 1) * c;
    // Nothing verifies the MAC the last hop passes on, but a constant there
    // would tell the last link that its packet has reached the end.
    Tag last_gamma;
    rng.fill(last_gamma);
    const auto block = block_for(l - 1, last_gamma);
    std::memcpy(beta.data(), block.data(), c);
    rng.fill(MutableByteSpan(beta.data() + c, head - c));
    xor_into(MutableByteSpan(beta.data(), head), ByteSpan(streams[l - 1].data(), head));
    std::memcpy(beta.data() + head, phi.data(), phi.size());
  }
  Tag gamma = header_mac(secrets[l - 1].sphinx, beta, chdr);
  for (std::size_t i = l - 1; i-- > 0;) {
    Bytes next(kSphinxBetaSize);
    const auto block = block_for(i, gamma);
    std::memcpy(next.data(), block.data(), c);
    std::memcpy(next.data() + c, beta.data(), kSphinxBetaSize - c);
    xor_into(next, ByteSpan(streams[i].data(), kSphinxBetaSize));
    beta = std::move(next);
    gamma = header_mac(secrets[i].sphinx, beta, chdr);
  }
  std::memcpy(out.header.beta.data(), beta.data(), kSphinxBetaSize);
  out.header.gamma = gamma;
  return out;
}

// Payload layering. Each hop XORs a keystream derived from its session key;
// the end hosts add one authenticated wrap keyed from the destination key.
void hop_layer(const SymKey& hop_key, SphinxPayload& payload) {
  const SymKey k = crypto::hash_to_key("hornet/setup/payload-hop", hop_key.bytes);
  const ByteArray<kIvSize> iv{};
  crypto::stream_xcrypt_inplace(k, iv, payload.bytes);
}

SphinxPayload wrap(std::string_view context, const SymKey& dest_key, ByteSpan inner) {
  if (inner.size() > kSphinxPayloadCapacity) {
    throw Error(ErrorCode::kPayloadTooLarge,
                std::to_string(inner.size()) + " bytes exceed Sphinx payload capacity");
  }
  const SymKey wk = crypto::hash_to_key(context, dest_key.bytes);
  SphinxPayload out;
  put_u16(out.bytes.data() + kMacSize, static_cast<std::uint16_t>(inner.size()));
  std::memcpy(out.bytes.data() + kMacSize + 2, inner.data(), inner.size());
  const Tag t = crypto::mac(crypto::derive_subkey(wk, SubkeyLabel::kMac),
                            ByteSpan(out.bytes).subspan(kMacSize));
  std::memcpy(out.bytes.data(), t.data(), kMacSize);
  const ByteArray<kIvSize> iv{};
  crypto::stream_xcrypt_inplace(crypto::derive_subkey(wk, SubkeyLabel::kEnc), iv, out.bytes);
  return out;
}

Bytes unwrap(std::string_view context, const SymKey& dest_key, SphinxPayload payload) {
  const SymKey wk = crypto::hash_to_key(context, dest_key.bytes);
  const ByteArray<kIvSize> iv{};
  crypto::stream_xcrypt_inplace(crypto::derive_subkey(wk, SubkeyLabel::kEnc), iv, payload.bytes);
  const Tag t = crypto::mac(crypto::derive_subkey(wk, SubkeyLabel::kMac),
                            ByteSpan(payload.bytes).subspan(kMacSize));
  if (!crypto::tag_equal(t, ByteSpan(payload.bytes).first(kMacSize))) {
    throw Error(ErrorCode::kTagMismatch, "Sphinx payload tag missing");
  }
  const std::size_t n = get_u16(payload.bytes.data() + kMacSize);
  if (n > kSphinxPayloadCapacity) throw Error(ErrorCode::kTagMismatch, "Sphinx payload length");
  const auto* p = payload.bytes.data() + kMacSize + 2;
  return Bytes(p, p + n);
}

constexpr std::string_view kSendWrap = "hornet/setup/payload-send";
constexpr std::string_view kRecvWrap = "hornet/setup/payload-recv";

}  // namespace

ByteArray<kSphinxHeaderSize> SphinxHeader::serialize() const {
  ByteArray<kSphinxHeaderSize> out;
  std::memcpy(out.data(), y.bytes.data(), kGroupElementSize);
  std::memcpy(out.data() + kGroupElementSize, beta.data(), kSphinxBetaSize);
  std::memcpy(out.data() + kGroupElementSize + kSphinxBetaSize, gamma.data(), kMacSize);
  return out;
}

SphinxHeader SphinxHeader::parse(ByteSpan bytes) {
  if (bytes.size() != kSphinxHeaderSize) {
    throw Error(ErrorCode::kLengthMismatch, "Sphinx header must be 384 bytes");
  }
  SphinxHeader h;
  std::memcpy(h.y.bytes.data(), bytes.data(), kGroupElementSize);
  std::memcpy(h.beta.data(), bytes.data() + kGroupElementSize, kSphinxBetaSize);
  std::memcpy(h.gamma.data(), bytes.data() + kGroupElementSize + kSphinxBetaSize, kMacSize);
  return h;
}

SphinxHeaders gen_sphx_hdr(const BootstrapInput& input, const CommonHeader& chdr, Rng& rng) {
  if (input.forward.size() > kMaxHops || input.backward.size() > kMaxHops) {
    throw Error(ErrorCode::kPathTooLong, "path longer than r = 7");
  }
  for (const auto* path : {&input.forward, &input.backward}) {
    for (const auto& hop : *path) {
      if (!crypto::is_valid_element(hop.public_key)) {
        throw Error(ErrorCode::kInvalidElement, "invalid node public key");
      }
    }
  }
  // The backward header gets its own ephemeral so its first group element
  // cannot be matched against the forward one.
  const Scalar backward_secret =
      crypto::hash_to_scalar("hornet/setup/backward-ephemeral", input.source_secret.bytes);

  PathHeader fwd = build_path_header(input.source_secret, input.forward,
                                     with_type(chdr, PacketType::kSetupForward), rng);
  PathHeader bwd = build_path_header(backward_secret, input.backward,
                                     with_type(chdr, PacketType::kSetupBackward), rng);
  return {fwd.header, bwd.header, {std::move(fwd.keys), std::move(bwd.keys)}, bwd.final_y};
}

SphinxStep proc_sphx_pkt(const SphinxHeader& header, const SphinxPayload& payload,
                         const Scalar& node_secret, const CommonHeader& chdr) {
  const GroupElement shared = crypto::dh(node_secret, header.y);
  const HopSecrets secrets = hop_secrets(header.y, shared);

  if (!crypto::tag_equal(header_mac(secrets.sphinx, header.beta, chdr), header.gamma)) {
    throw Error(ErrorCode::kMacMismatch, "Sphinx header MAC check failed");
  }

  ByteArray<kStreamSize> buf{};
  std::memcpy(buf.data(), header.beta.data(), kSphinxBetaSize);
  xor_into(buf, routing_stream(secrets.sphinx));

  SphinxStep step;
  step.key = secrets.session;
  step.route = RoutingSegment::parse(ByteSpan(buf.data(), kRoutingSegmentSize));
  std::memcpy(step.header.gamma.data(), buf.data() + kRoutingSegmentSize, kMacSize);
  std::memcpy(step.header.beta.data(), buf.data() + c, kSphinxBetaSize);
  step.header.y = crypto::dh(secrets.blind, header.y);
  step.payload = payload;
  hop_layer(secrets.session, step.payload);
  return step;
}

SphinxPayload gen_sphx_pl_send(std::span<const SymKey> forward_keys, ByteSpan inner) {
  if (forward_keys.empty()) throw Error(ErrorCode::kInvalidArgument, "empty forward path");
  SphinxPayload out = wrap(kSendWrap, forward_keys.back(), inner);
  for (std::size_t i = forward_keys.size(); i-- > 0;) hop_layer(forward_keys[i], out);
  return out;
}

Bytes unwrap_sphx_pl_send(const SymKey& dest_key, const SphinxPayload& payload) {
  return unwrap(kSendWrap, dest_key, payload);
}

SphinxPayload gen_sphx_pl_recv(const SymKey& dest_key, ByteSpan inner) {
  return wrap(kRecvWrap, dest_key, inner);
}

Bytes unwrap_sphx_pl_recv(std::span<const SymKey> backward_keys, const SymKey& dest_key,
                          const SphinxPayload& payload) {
  SphinxPayload p = payload;
  for (std::size_t j = backward_keys.size(); j-- > 0;) hop_layer(backward_keys[j], p);
  return unwrap(kRecvWrap, dest_key, p);
}

}  // namespace hornet
