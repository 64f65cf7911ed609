#pragma once

// Primitive family used by every other module. All concrete algorithm
// choices live in crypto_kit.cpp:
//   derive_subkey   SP 800-108 counter-mode KDF, AES-CMAC PRF, per-label
//                   label string (group elements are first compressed with
//                   BLAKE2b)
//   mac             AES-CMAC
//   prg             AES-128-CTR keystream, variant mixed into the key
//   prp_wide (16)   AES-128 single block
//   prp_wide (32)   4-round Feistel over two 16-byte halves, AES round fn
//   stream_xcrypt   AES-128-CTR, IV is the initial counter block
//   dh              ristretto255 scalar multiplication
//   hash_to_*       unkeyed BLAKE2b with a context prefix

#include <atomic>
#include <compare>
#include <cstdint>
#include <memory>

#include "hornet/bytes.hpp"
#include "hornet/params.hpp"

namespace hornet {

struct SymKey {
  ByteArray<kKeySize> bytes{};
  auto operator<=>(const SymKey&) const = default;
};

struct GroupElement {
  ByteArray<kGroupElementSize> bytes{};
  auto operator<=>(const GroupElement&) const = default;
};

struct Scalar {
  ByteArray<kScalarSize> bytes{};
  auto operator<=>(const Scalar&) const = default;
};

using Tag = ByteArray<kMacSize>;

enum class SubkeyLabel : std::uint8_t { kMac, kPrg0, kPrg1, kPrg2, kPrp, kEnc, kDec };

inline constexpr SubkeyLabel kAllSubkeyLabels[] = {
    SubkeyLabel::kMac, SubkeyLabel::kPrg0, SubkeyLabel::kPrg1, SubkeyLabel::kPrg2,
    SubkeyLabel::kPrp, SubkeyLabel::kEnc,  SubkeyLabel::kDec};

enum class PrgVariant : std::uint8_t { k0 = 0, k1 = 1, k2 = 2 };
enum class PrpDirection { kForward, kInverse };
enum class CipherDirection { kEncrypt, kDecrypt };

namespace crypto {

// Process-wide instrumentation. Only counts, never influences results.
struct Counters {
  std::atomic<std::uint64_t> dh_calls{0};
  std::atomic<std::uint64_t> symmetric_calls{0};
};
Counters& counters();

// Must be called once before any other primitive; idempotent.
void init();

SymKey derive_subkey(const SymKey& key, SubkeyLabel label);
SymKey derive_subkey(const GroupElement& element, SubkeyLabel label);
// Same values as derive_subkey, one per label, sharing a single key setup.
void derive_subkeys(const SymKey& key, std::span<const SubkeyLabel> labels,
                    std::span<SymKey> out);

Tag mac(const SymKey& key, ByteSpan data);
// Constant-time tag comparison.
bool tag_equal(ByteSpan a, ByteSpan b);

// Throws kInvalidArgument unless 1 <= out_len <= kMaxPrgOutput.
Bytes prg(const SymKey& key, PrgVariant variant, std::size_t out_len);
void prg_into(const SymKey& key, PrgVariant variant, MutableByteSpan out);

// Block length must be 16 or 32 bytes.
Bytes prp_wide(const SymKey& key, ByteSpan block, PrpDirection direction);
void prp_wide_inplace(const SymKey& key, MutableByteSpan block, PrpDirection direction);

// prp_wide with the key schedule built once, for keys used many times (a
// node's SV-derived sealing key).
class WidePrp {
 public:
  explicit WidePrp(const SymKey& key);
  ~WidePrp();
  WidePrp(WidePrp&&) noexcept;
  WidePrp& operator=(WidePrp&&) noexcept;

  void apply(MutableByteSpan block, PrpDirection direction) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Data length must be a positive multiple of 16.
Bytes stream_xcrypt(const SymKey& key, ByteSpan iv, ByteSpan data, CipherDirection direction);
void stream_xcrypt_inplace(const SymKey& key, ByteSpan iv, MutableByteSpan data);

// Throws kInvalidElement if `element` does not decode to a non-identity
// group element, or the product is the identity.
GroupElement dh(const Scalar& scalar, const GroupElement& element);

GroupElement generator();
GroupElement public_from_secret(const Scalar& secret);
bool is_valid_element(const GroupElement& element);

Scalar scalar_from_uniform(ByteSpan wide_bytes);  // needs 64 bytes
Scalar scalar_from_u64(std::uint64_t value);
Scalar scalar_mul(const Scalar& a, const Scalar& b);
// Maps arbitrary input to a non-zero scalar.
Scalar hash_to_scalar(std::string_view context, ByteSpan data);
// Generic keyed hash to a 16-byte key, for key material that is not one of
// the seven labelled subkeys (session keys from DH, PRG variant keys, ...).
SymKey hash_to_key(std::string_view context, ByteSpan data);

}  // namespace crypto

// Deterministic, seedable randomness (ChaCha20 keystream). Stands in for the
// unseeded RAND(a) so simulations and tests replay bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  void fill(MutableByteSpan out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);
  SymKey key();
  Scalar scalar();

 private:
  void refill();

  ByteArray<32> key_{};
  std::uint64_t block_counter_ = 0;
  ByteArray<1024> buffer_{};
  std::size_t offset_ = sizeof(buffer_);
};

}  // namespace hornet
