#include "hornet/ahdr.hpp"

#include <cstring>
#include <optional>

#include "hornet/error.hpp"

namespace hornet {
namespace {

constexpr std::size_t c = kBlockSize;

// Standard headers use PRG2, nested headers PRG0 over twice the width.
template <std::size_t Width>
struct HeaderStream;

template <>
struct HeaderStream<kAhdrSize> {
  static constexpr SubkeyLabel kLabel = SubkeyLabel::kPrg2;
  static constexpr PrgVariant kVariant = PrgVariant::k2;
  static void fill(const SymKey& s, MutableByteSpan out) {
    crypto::prg_into(crypto::derive_subkey(s, kLabel), kVariant, out);
  }
};

template <>
struct HeaderStream<kNestedAhdrSize> {
  static constexpr SubkeyLabel kLabel = SubkeyLabel::kPrg0;
  static constexpr PrgVariant kVariant = PrgVariant::k0;
  static void fill(const SymKey& s, MutableByteSpan out) {
    crypto::prg_into(crypto::derive_subkey(s, kLabel), kVariant, out);
  }
};

void check_path(std::span<const SymKey> keys, std::span<const ForwardingSegment> fses) {
  if (keys.size() != fses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "key and FS lists differ in length");
  }
  if (keys.empty() || keys.size() > kMaxHops) {
    throw Error(ErrorCode::kInvalidArgument, "path length must be in [1, r]");
  }
}

// Builds FS_0 || gamma_0 || beta_0 for a header of `Width` bytes. The last
// hop's beta starts with `init` (length Width - l*c), already in the form
// it must take on the wire.
template <std::size_t Width>
ByteArray<Width> build_header(std::span<const SymKey> keys,
                              std::span<const ForwardingSegment> fses, ByteSpan init,
                              std::span<const ByteArray<Width>> streams) {
  constexpr std::size_t beta_len = Width - c;
  const std::size_t l = keys.size();

  // phi_{i+1} = (phi_i || 0^c) XOR stream_i[Width - (i+1)c ..]
  Bytes phi;
  for (std::size_t i = 0; i + 1 < l; ++i) {
    phi.resize(phi.size() + c, 0);
    const std::size_t from = Width - (i + 1) * c;
    xor_into(phi, ByteSpan(streams[i].data() + from, (i + 1) * c));
  }

  Bytes beta(beta_len);
  std::memcpy(beta.data(), init.data(), init.size());
  std::memcpy(beta.data() + init.size(), phi.data(), phi.size());

  Bytes mac_input(kFsSize + beta_len);
  auto gamma_for = [&](std::size_t i) {
    std::memcpy(mac_input.data(), fses[i].sealed.data(), kFsSize);
    std::memcpy(mac_input.data() + kFsSize, beta.data(), beta_len);
    return crypto::mac(crypto::derive_subkey(keys[i], SubkeyLabel::kMac), mac_input);
  };

  Tag gamma = gamma_for(l - 1);
  for (std::size_t i = l - 1; i-- > 0;) {
    Bytes next(beta_len);
    std::memcpy(next.data(), fses[i + 1].sealed.data(), kFsSize);
    std::memcpy(next.data() + kFsSize, gamma.data(), kMacSize);
    std::memcpy(next.data() + c, beta.data(), beta_len - c);
    xor_into(next, ByteSpan(streams[i].data(), beta_len));
    beta = std::move(next);
    gamma = gamma_for(i);
  }

  ByteArray<Width> out;
  std::memcpy(out.data(), fses[0].sealed.data(), kFsSize);
  std::memcpy(out.data() + kFsSize, gamma.data(), kMacSize);
  std::memcpy(out.data() + c, beta.data(), beta_len);
  return out;
}

template <std::size_t Width>
std::vector<ByteArray<Width>> header_streams(std::span<const SymKey> keys) {
  std::vector<ByteArray<Width>> streams(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) HeaderStream<Width>::fill(keys[i], streams[i]);
  return streams;
}

template <std::size_t Width>
HeaderStep<ByteArray<Width>> process_header(const FsSealer& sealer,
                                            const ByteArray<Width>& header, ExpiryTime now) {
  ForwardingSegment fs;
  std::memcpy(fs.sealed.data(), header.data(), kFsSize);
  const OpenedSegment opened = sealer.open(fs);

  constexpr SubkeyLabel labels[] = {SubkeyLabel::kMac, HeaderStream<Width>::kLabel};
  SymKey subkeys[2];
  crypto::derive_subkeys(opened.key, labels, subkeys);

  const ByteSpan gamma(header.data() + kFsSize, kMacSize);
  ByteArray<Width - kMacSize> mac_input;
  std::memcpy(mac_input.data(), header.data(), kFsSize);
  std::memcpy(mac_input.data() + kFsSize, header.data() + c, Width - c);
  const Tag expect = crypto::mac(subkeys[0], mac_input);
  if (!crypto::tag_equal(expect, gamma)) {
    throw Error(ErrorCode::kMacMismatch, "anonymous header MAC check failed");
  }
  if (!(now < opened.exp)) {
    throw Error(ErrorCode::kSessionExpired, "forwarding segment expired");
  }

  HeaderStep<ByteArray<Width>> step{opened.key, opened.route, opened.exp, {}};
  std::memcpy(step.next.data(), header.data() + c, Width - c);
  std::memset(step.next.data() + Width - c, 0, c);
  ByteArray<Width> stream;
  crypto::prg_into(subkeys[1], HeaderStream<Width>::kVariant, stream);
  xor_into(step.next, stream);
  return step;
}

}  // namespace

ForwardingSegment Ahdr::fs() const {
  ForwardingSegment out;
  std::memcpy(out.sealed.data(), bytes.data(), kFsSize);
  return out;
}

ForwardingSegment NestedAhdr::fs() const {
  ForwardingSegment out;
  std::memcpy(out.sealed.data(), bytes.data(), kFsSize);
  return out;
}

Ahdr create_ahdr(std::span<const SymKey> keys, std::span<const ForwardingSegment> fses,
                 Rng& rng) {
  check_path(keys, fses);
  const auto streams = header_streams<kAhdrSize>(keys);
  const Bytes init = rng.bytes((kMaxHops - keys.size()) * c);
  Ahdr out;
  out.bytes = build_header<kAhdrSize>(keys, fses, init, streams);
  return out;
}

AhdrStep proc_ahdr(const SymKey& sv, const Ahdr& header, ExpiryTime now) {
  return proc_ahdr(FsSealer(sv), header, now);
}

AhdrStep proc_ahdr(const FsSealer& sealer, const Ahdr& header, ExpiryTime now) {
  auto raw = process_header<kAhdrSize>(sealer, header.bytes, now);
  return {raw.key, raw.route, raw.exp, Ahdr{raw.next}};
}

NestedAhdr create_nested_ahdr(std::span<const SymKey> keys,
                              std::span<const ForwardingSegment> fses, const Ahdr& inner,
                              Rng& rng) {
  check_path(keys, fses);
  const std::size_t l = keys.size();
  const auto streams = header_streams<kNestedAhdrSize>(keys);
  // {A || rand(c(r-l))} XOR stream_{l-1}[0 .. c(2r-l)), so the last hop's
  // decryption exposes A at the front of its output.
  Bytes init(kAhdrSize + (kMaxHops - l) * c);
  std::memcpy(init.data(), inner.bytes.data(), kAhdrSize);
  rng.fill(MutableByteSpan(init).subspan(kAhdrSize));
  xor_into(init, ByteSpan(streams[l - 1].data(), init.size()));
  NestedAhdr out;
  out.bytes = build_header<kNestedAhdrSize>(keys, fses, init, streams);
  return out;
}

NestedAhdrStep proc_nested_ahdr(const SymKey& sv, const NestedAhdr& header, ExpiryTime now) {
  return proc_nested_ahdr(FsSealer(sv), header, now);
}

NestedAhdrStep proc_nested_ahdr(const FsSealer& sealer, const NestedAhdr& header,
                                ExpiryTime now) {
  auto raw = process_header<kNestedAhdrSize>(sealer, header.bytes, now);
  return {raw.key, raw.route, raw.exp, NestedAhdr{raw.next}};
}

Ahdr inner_ahdr(const NestedAhdr& header) {
  Ahdr out;
  std::memcpy(out.bytes.data(), header.bytes.data(), kAhdrSize);
  return out;
}

Ahdr advance_ahdr(const Ahdr& header, const SymKey& hop_key) {
  Ahdr out;
  std::memcpy(out.bytes.data(), header.bytes.data() + c, kAhdrSize - c);
  std::memset(out.bytes.data() + kAhdrSize - c, 0, c);
  ByteArray<kAhdrSize> stream;
  HeaderStream<kAhdrSize>::fill(hop_key, stream);
  xor_into(out.bytes, stream);
  return out;
}

}  // namespace hornet
