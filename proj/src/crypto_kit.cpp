#include "hornet/crypto_kit.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "hornet/detail/aes128.hpp"
#include "hornet/error.hpp"

namespace hornet {
namespace crypto {
namespace {

const char* label_context(SubkeyLabel label) {
  switch (label) {
    case SubkeyLabel::kMac: return "sk/mac";
    case SubkeyLabel::kPrg0: return "sk/prg0";
    case SubkeyLabel::kPrg1: return "sk/prg1";
    case SubkeyLabel::kPrg2: return "sk/prg2";
    case SubkeyLabel::kPrp: return "sk/prp";
    case SubkeyLabel::kEnc: return "sk/enc";
    case SubkeyLabel::kDec: return "sk/dec";
  }
  return "sk/?";
}

void bump_symmetric() { counters().symmetric_calls.fetch_add(1, std::memory_order_relaxed); }

void keyed_blake2b(MutableByteSpan out, ByteSpan key, ByteSpan message) {
  crypto_generichash(out.data(), out.size(), message.data(), message.size(), key.data(),
                     key.size());
}

ByteSpan as_bytes(const char* s) {
  return {reinterpret_cast<const std::uint8_t*>(s), std::strlen(s)};
}

// NIST SP 800-108 counter-mode KDF with AES-CMAC as the PRF:
//   K(i) = CMAC(key, [i]_32 || label || 0x00 || [8 * out_len]_32)
// Labels of up to 7 bytes keep each input to a single CMAC block.
void kdf(const detail::Cmac& prf, std::string_view label, MutableByteSpan out) {
  std::uint8_t msg[64];
  const std::size_t n = 4 + label.size() + 1 + 4;
  if (n > sizeof(msg)) throw std::logic_error("KDF label too long");
  std::memcpy(msg + 4, label.data(), label.size());
  msg[4 + label.size()] = 0;
  put_u32(msg + 5 + label.size(), static_cast<std::uint32_t>(8 * out.size()));
  std::uint8_t block[16];
  for (std::size_t off = 0, i = 1; off < out.size(); off += 16, ++i) {
    put_u32(msg, static_cast<std::uint32_t>(i));
    prf.tag(msg, n, block);
    std::memcpy(out.data() + off, block, std::min<std::size_t>(16, out.size() - off));
  }
}

void kdf(const SymKey& key, std::string_view label, MutableByteSpan out) {
  kdf(detail::Cmac(key.bytes.data()), label, out);
}

}  // namespace

Counters& counters() {
  static Counters instance;
  return instance;
}

void init() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

SymKey derive_subkey(const SymKey& key, SubkeyLabel label) {
  bump_symmetric();
  SymKey out;
  kdf(key, label_context(label), out.bytes);
  return out;
}

void derive_subkeys(const SymKey& key, std::span<const SubkeyLabel> labels,
                    std::span<SymKey> out) {
  if (labels.size() != out.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one output key per label");
  }
  const detail::Cmac prf(key.bytes.data());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bump_symmetric();
    kdf(prf, label_context(labels[i]), out[i].bytes);
  }
}

SymKey derive_subkey(const GroupElement& element, SubkeyLabel label) {
  bump_symmetric();
  SymKey compressed;
  keyed_blake2b(compressed.bytes, element.bytes, as_bytes("hornet/group-element"));
  SymKey out;
  kdf(compressed, label_context(label), out.bytes);
  return out;
}

Tag mac(const SymKey& key, ByteSpan data) {
  bump_symmetric();
  Tag out;
  detail::aes_cmac(key.bytes.data(), data.data(), data.size(), out.data());
  return out;
}

bool tag_equal(ByteSpan a, ByteSpan b) {
  return a.size() == b.size() && sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

void prg_into(const SymKey& key, PrgVariant variant, MutableByteSpan out) {
  if (out.empty() || out.size() > kMaxPrgOutput) {
    throw Error(ErrorCode::kInvalidArgument,
                "prg output length " + std::to_string(out.size()) + " out of range");
  }
  bump_symmetric();
  static constexpr std::string_view kVariantLabels[] = {"prg/0", "prg/1", "prg/2"};
  ByteArray<16> stream_key;
  kdf(key, kVariantLabels[static_cast<int>(variant)], stream_key);
  const ByteArray<16> zero_iv{};
  std::memset(out.data(), 0, out.size());
  detail::Aes128(stream_key.data()).ctr_xor(zero_iv.data(), out.data(), out.size());
}

Bytes prg(const SymKey& key, PrgVariant variant, std::size_t out_len) {
  if (out_len == 0 || out_len > kMaxPrgOutput) {
    throw Error(ErrorCode::kInvalidArgument,
                "prg output length " + std::to_string(out_len) + " out of range");
  }
  Bytes out(out_len);
  prg_into(key, variant, out);
  return out;
}

// 32-byte blocks: Luby-Rackoff over two 16-byte halves; round i uses AES
// under its own KDF-derived key.
struct WidePrp::Impl {
  detail::Aes128 block;
  std::array<detail::Aes128, 4> rounds;

  Impl(const SymKey& key, const ByteArray<64>& round_keys)
      : block(key.bytes.data()),
        rounds{detail::Aes128(round_keys.data()), detail::Aes128(round_keys.data() + 16),
               detail::Aes128(round_keys.data() + 32), detail::Aes128(round_keys.data() + 48)} {}
};

WidePrp::WidePrp(const SymKey& key) {
  ByteArray<64> round_keys;
  kdf(key, "prp32", round_keys);
  impl_ = std::make_unique<Impl>(key, round_keys);
  sodium_memzero(round_keys.data(), round_keys.size());
}

WidePrp::~WidePrp() = default;
WidePrp::WidePrp(WidePrp&&) noexcept = default;
WidePrp& WidePrp::operator=(WidePrp&&) noexcept = default;

void WidePrp::apply(MutableByteSpan block, PrpDirection direction) const {
  bump_symmetric();
  if (block.size() == 16) {
    if (direction == PrpDirection::kForward) {
      impl_->block.encrypt_blocks(block.data(), block.data(), 1);
    } else {
      impl_->block.decrypt_block(block.data(), block.data());
    }
    return;
  }
  if (block.size() != 32) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported PRP block length " + std::to_string(block.size()));
  }
  std::uint8_t* left = block.data();
  std::uint8_t* right = block.data() + 16;
  ByteArray<16> f;
  auto round = [&](int i) {
    impl_->rounds[i].encrypt_blocks(right, f.data(), 1);
    for (int j = 0; j < 16; ++j) left[j] ^= f[j];
  };
  if (direction == PrpDirection::kForward) {
    for (int i = 0; i < 4; ++i) {
      round(i);
      std::swap_ranges(left, left + 16, right);
    }
  } else {
    for (int i = 3; i >= 0; --i) {
      std::swap_ranges(left, left + 16, right);
      round(i);
    }
  }
}

void prp_wide_inplace(const SymKey& key, MutableByteSpan block, PrpDirection direction) {
  if (block.size() == 16) {
    bump_symmetric();
    const detail::Aes128 aes(key.bytes.data());
    if (direction == PrpDirection::kForward) {
      aes.encrypt_blocks(block.data(), block.data(), 1);
    } else {
      aes.decrypt_block(block.data(), block.data());
    }
    return;
  }
  if (block.size() != 32) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported PRP block length " + std::to_string(block.size()));
  }
  WidePrp(key).apply(block, direction);
}

Bytes prp_wide(const SymKey& key, ByteSpan block, PrpDirection direction) {
  Bytes out(block.begin(), block.end());
  prp_wide_inplace(key, out, direction);
  return out;
}

void stream_xcrypt_inplace(const SymKey& key, ByteSpan iv, MutableByteSpan data) {
  if (iv.size() != kIvSize) throw Error(ErrorCode::kInvalidArgument, "IV must be 16 bytes");
  if (data.empty() || data.size() % 16 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "stream data length " + std::to_string(data.size()) +
                    " is not a positive multiple of 16");
  }
  bump_symmetric();
  detail::Aes128(key.bytes.data()).ctr_xor(iv.data(), data.data(), data.size());
}

Bytes stream_xcrypt(const SymKey& key, ByteSpan iv, ByteSpan data, CipherDirection /*direction*/) {
  // CTR mode: encryption and decryption are the same keystream XOR.
  Bytes out(data.begin(), data.end());
  stream_xcrypt_inplace(key, iv, out);
  return out;
}

GroupElement dh(const Scalar& scalar, const GroupElement& element) {
  counters().dh_calls.fetch_add(1, std::memory_order_relaxed);
  if (crypto_core_ristretto255_is_valid_point(element.bytes.data()) != 1) {
    throw Error(ErrorCode::kInvalidElement, "group element does not decode");
  }
  GroupElement out;
  if (crypto_scalarmult_ristretto255(out.bytes.data(), scalar.bytes.data(),
                                     element.bytes.data()) != 0) {
    throw Error(ErrorCode::kInvalidElement, "scalar multiplication produced the identity");
  }
  return out;
}

GroupElement public_from_secret(const Scalar& secret) {
  counters().dh_calls.fetch_add(1, std::memory_order_relaxed);
  GroupElement out;
  if (crypto_scalarmult_ristretto255_base(out.bytes.data(), secret.bytes.data()) != 0) {
    throw Error(ErrorCode::kInvalidElement, "zero secret scalar");
  }
  return out;
}

GroupElement generator() {
  static const GroupElement g = [] {
    init();
    GroupElement out;
    const Scalar one = scalar_from_u64(1);
    crypto_scalarmult_ristretto255_base(out.bytes.data(), one.bytes.data());
    return out;
  }();
  return g;
}

bool is_valid_element(const GroupElement& element) {
  return crypto_core_ristretto255_is_valid_point(element.bytes.data()) == 1;
}

Scalar scalar_from_uniform(ByteSpan wide_bytes) {
  if (wide_bytes.size() != crypto_core_ristretto255_NONREDUCEDSCALARBYTES) {
    throw Error(ErrorCode::kInvalidArgument, "scalar reduction needs 64 bytes");
  }
  Scalar out;
  crypto_core_ristretto255_scalar_reduce(out.bytes.data(), wide_bytes.data());
  return out;
}

Scalar scalar_from_u64(std::uint64_t value) {
  Scalar out;
  for (int i = 0; i < 8; ++i) out.bytes[i] = static_cast<std::uint8_t>(value >> (8 * i));
  return out;
}

Scalar scalar_mul(const Scalar& a, const Scalar& b) {
  Scalar out;
  crypto_core_ristretto255_scalar_mul(out.bytes.data(), a.bytes.data(), b.bytes.data());
  return out;
}

Scalar hash_to_scalar(std::string_view context, ByteSpan data) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 64);
  crypto_generichash_update(&st, reinterpret_cast<const std::uint8_t*>(context.data()),
                            context.size());
  const std::uint8_t sep = 0;
  crypto_generichash_update(&st, &sep, 1);
  crypto_generichash_update(&st, data.data(), data.size());
  ByteArray<64> wide;
  crypto_generichash_final(&st, wide.data(), wide.size());
  Scalar out = scalar_from_uniform(wide);
  if (sodium_is_zero(out.bytes.data(), out.bytes.size())) out = scalar_from_u64(1);
  return out;
}

SymKey hash_to_key(std::string_view context, ByteSpan data) {
  bump_symmetric();
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, kKeySize);
  crypto_generichash_update(&st, reinterpret_cast<const std::uint8_t*>(context.data()),
                            context.size());
  const std::uint8_t sep = 0;
  crypto_generichash_update(&st, &sep, 1);
  crypto_generichash_update(&st, data.data(), data.size());
  SymKey out;
  crypto_generichash_final(&st, out.bytes.data(), out.bytes.size());
  return out;
}

}  // namespace crypto

Rng::Rng(std::uint64_t seed) {
  crypto::init();
  ByteArray<8> le;
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  crypto_generichash(key_.data(), key_.size(), le.data(), le.size(),
                     reinterpret_cast<const std::uint8_t*>("hornet/rng/seed-key-v1"), 22);
}

void Rng::refill() {
  ByteArray<crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(block_counter_ >> (8 * i));
  ++block_counter_;
  crypto_stream_chacha20_ietf(buffer_.data(), buffer_.size(), nonce.data(), key_.data());
  offset_ = 0;
}

void Rng::fill(MutableByteSpan out) {
  std::size_t written = 0;
  while (written < out.size()) {
    if (offset_ == buffer_.size()) refill();
    const std::size_t n = std::min(out.size() - written, buffer_.size() - offset_);
    std::memcpy(out.data() + written, buffer_.data() + offset_, n);
    offset_ += n;
    written += n;
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Rng::next_u64() {
  ByteArray<8> b;
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

SymKey Rng::key() {
  SymKey k;
  fill(k.bytes);
  return k;
}

Scalar Rng::scalar() {
  for (;;) {
    ByteArray<64> wide;
    fill(wide);
    Scalar s = crypto::scalar_from_uniform(wide);
    if (!sodium_is_zero(s.bytes.data(), s.bytes.size())) return s;
  }
}

}  // namespace hornet
