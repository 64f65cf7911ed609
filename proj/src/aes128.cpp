#include "hornet/detail/aes128.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstring>
#include <stdexcept>
#include <string>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define HORNET_HAVE_AESNI 1
#else
#define HORNET_HAVE_AESNI 0
#endif

namespace hornet::detail {
namespace {

std::atomic<AesBackend> g_backend{AesBackend::kAuto};

#if HORNET_HAVE_AESNI

#define HORNET_AES_TARGET __attribute__((target("aes,sse4.1")))

template <int Rcon>
HORNET_AES_TARGET inline __m128i expand_step(__m128i key) {
  __m128i t = _mm_aeskeygenassist_si128(key, Rcon);
  t = _mm_shuffle_epi32(t, _MM_SHUFFLE(3, 3, 3, 3));
  __m128i s = _mm_slli_si128(key, 4);
  key = _mm_xor_si128(key, s);
  s = _mm_slli_si128(s, 4);
  key = _mm_xor_si128(key, s);
  s = _mm_slli_si128(s, 4);
  key = _mm_xor_si128(key, s);
  return _mm_xor_si128(key, t);
}

HORNET_AES_TARGET void expand_key(const std::uint8_t* key, __m128i* enc, __m128i* dec) {
  enc[0] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(key));
  enc[1] = expand_step<0x01>(enc[0]);
  enc[2] = expand_step<0x02>(enc[1]);
  enc[3] = expand_step<0x04>(enc[2]);
  enc[4] = expand_step<0x08>(enc[3]);
  enc[5] = expand_step<0x10>(enc[4]);
  enc[6] = expand_step<0x20>(enc[5]);
  enc[7] = expand_step<0x40>(enc[6]);
  enc[8] = expand_step<0x80>(enc[7]);
  enc[9] = expand_step<0x1b>(enc[8]);
  enc[10] = expand_step<0x36>(enc[9]);
  dec[0] = enc[10];
  for (int i = 1; i < 10; ++i) dec[i] = _mm_aesimc_si128(enc[10 - i]);
  dec[10] = enc[0];
}

HORNET_AES_TARGET inline __m128i encrypt_one(const __m128i* rk, __m128i b) {
  b = _mm_xor_si128(b, rk[0]);
  for (int i = 1; i < 10; ++i) b = _mm_aesenc_si128(b, rk[i]);
  return _mm_aesenclast_si128(b, rk[10]);
}

HORNET_AES_TARGET inline __m128i decrypt_one(const __m128i* rk, __m128i b) {
  b = _mm_xor_si128(b, rk[0]);
  for (int i = 1; i < 10; ++i) b = _mm_aesdec_si128(b, rk[i]);
  return _mm_aesdeclast_si128(b, rk[10]);
}

HORNET_AES_TARGET void hw_encrypt_blocks(const __m128i* rk, const std::uint8_t* in,
                                         std::uint8_t* out, std::size_t blocks) {
  for (std::size_t i = 0; i < blocks; ++i) {
    const __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * i));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * i), encrypt_one(rk, b));
  }
}

HORNET_AES_TARGET void hw_decrypt_block(const __m128i* rk, const std::uint8_t* in,
                                        std::uint8_t* out) {
  const __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in));
  _mm_storeu_si128(reinterpret_cast<__m128i*>(out), decrypt_one(rk, b));
}

#endif  // HORNET_HAVE_AESNI

#if HORNET_HAVE_AESNI
// Counter kept as two host-order halves; building each block in registers
// avoids reloading bytes that were just written.
struct Counter128 {
  std::uint64_t hi;
  std::uint64_t lo;
  HORNET_AES_TARGET __m128i next() {
    const __m128i b = _mm_set_epi64x(static_cast<long long>(__builtin_bswap64(lo)),
                                     static_cast<long long>(__builtin_bswap64(hi)));
    if (++lo == 0) ++hi;
    return b;
  }
};

HORNET_AES_TARGET void hw_ctr_xor(const __m128i* rk, const std::uint8_t* iv, std::uint8_t* data,
                                  std::size_t n) {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  for (int i = 0; i < 8; ++i) {
    hi = (hi << 8) | iv[i];
    lo = (lo << 8) | iv[8 + i];
  }
  Counter128 counter{hi, lo};
  std::size_t off = 0;
  // Four blocks at a time keeps the AES units busy.
  while (n - off >= 64) {
    __m128i c[4];
    for (int j = 0; j < 4; ++j) c[j] = _mm_xor_si128(counter.next(), rk[0]);
    for (int r = 1; r < 10; ++r) {
      for (int j = 0; j < 4; ++j) c[j] = _mm_aesenc_si128(c[j], rk[r]);
    }
    for (int j = 0; j < 4; ++j) {
      c[j] = _mm_aesenclast_si128(c[j], rk[10]);
      auto* p = reinterpret_cast<__m128i*>(data + off + 16 * j);
      _mm_storeu_si128(p, _mm_xor_si128(_mm_loadu_si128(p), c[j]));
    }
    off += 64;
  }
  while (off < n) {
    const __m128i ks = encrypt_one(rk, counter.next());
    alignas(16) std::uint8_t block[16];
    _mm_store_si128(reinterpret_cast<__m128i*>(block), ks);
    const std::size_t take = n - off < 16 ? n - off : 16;
    for (std::size_t i = 0; i < take; ++i) data[off + i] ^= block[i];
    off += take;
  }
}
#endif

bool cpu_has_aes() {
#if HORNET_HAVE_AESNI
  static const bool has = __builtin_cpu_supports("aes") && __builtin_cpu_supports("sse4.1");
  return has;
#else
  return false;
#endif
}

bool use_hardware() {
  const AesBackend b = g_backend.load(std::memory_order_relaxed);
  return b != AesBackend::kOpenSsl && cpu_has_aes();
}

const EVP_CIPHER* evp_cipher(const char* name) {
  EVP_CIPHER* c = EVP_CIPHER_fetch(nullptr, name, nullptr);
  if (c == nullptr) throw std::runtime_error(std::string(name) + " unavailable in libcrypto");
  return c;
}

const EVP_CIPHER* evp_ecb() {
  static const EVP_CIPHER* c = evp_cipher("AES-128-ECB");
  return c;
}

const EVP_CIPHER* evp_ctr() {
  static const EVP_CIPHER* c = evp_cipher("AES-128-CTR");
  return c;
}

}  // namespace

void set_aes_backend(AesBackend backend) { g_backend.store(backend); }

AesBackend active_aes_backend() {
  return use_hardware() ? AesBackend::kHardware : AesBackend::kOpenSsl;
}

bool hardware_aes_available() { return cpu_has_aes(); }

struct Aes128::Impl {
  std::uint8_t key[16];
  EVP_CIPHER_CTX* enc = nullptr;
  EVP_CIPHER_CTX* dec = nullptr;
  ~Impl() {
    EVP_CIPHER_CTX_free(enc);
    EVP_CIPHER_CTX_free(dec);
  }
};

Aes128::Aes128(const std::uint8_t* key) {
#if HORNET_HAVE_AESNI
  if (use_hardware()) {
    hardware_ = true;
    auto* rk = reinterpret_cast<__m128i*>(storage_);
    expand_key(key, rk, rk + 11);
    return;
  }
#endif
  soft_ = std::make_unique<Impl>();
  std::memcpy(soft_->key, key, 16);
  soft_->enc = EVP_CIPHER_CTX_new();
  EVP_EncryptInit_ex2(soft_->enc, evp_ecb(), key, nullptr, nullptr);
  EVP_CIPHER_CTX_set_padding(soft_->enc, 0);
}

Aes128::~Aes128() = default;

void Aes128::encrypt_blocks(const std::uint8_t* in, std::uint8_t* out, std::size_t blocks) const {
#if HORNET_HAVE_AESNI
  if (hardware_) {
    hw_encrypt_blocks(reinterpret_cast<const __m128i*>(storage_), in, out, blocks);
    return;
  }
#endif
  int len = 0;
  EVP_EncryptUpdate(soft_->enc, out, &len, in, static_cast<int>(16 * blocks));
}

void Aes128::decrypt_block(const std::uint8_t* in, std::uint8_t* out) const {
#if HORNET_HAVE_AESNI
  if (hardware_) {
    hw_decrypt_block(reinterpret_cast<const __m128i*>(storage_) + 11, in, out);
    return;
  }
#endif
  if (soft_->dec == nullptr) {
    soft_->dec = EVP_CIPHER_CTX_new();
    EVP_DecryptInit_ex2(soft_->dec, evp_ecb(), soft_->key, nullptr, nullptr);
    EVP_CIPHER_CTX_set_padding(soft_->dec, 0);
  }
  int len = 0;
  EVP_DecryptUpdate(soft_->dec, out, &len, in, 16);
}

void Aes128::ctr_xor(const std::uint8_t* iv, std::uint8_t* data, std::size_t n) const {
#if HORNET_HAVE_AESNI
  if (hardware_) {
    hw_ctr_xor(reinterpret_cast<const __m128i*>(storage_), iv, data, n);
    return;
  }
#endif
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  int len = 0;
  EVP_EncryptInit_ex2(ctx, evp_ctr(), soft_->key, iv, nullptr);
  EVP_EncryptUpdate(ctx, data, &len, data, static_cast<int>(n));
  EVP_CIPHER_CTX_free(ctx);
}

namespace {

void double_block(std::uint8_t* b) {
  const std::uint8_t carry = b[0] >> 7;
  for (int i = 0; i < 15; ++i) b[i] = static_cast<std::uint8_t>((b[i] << 1) | (b[i + 1] >> 7));
  b[15] = static_cast<std::uint8_t>(b[15] << 1);
  if (carry) b[15] ^= 0x87;
}

}  // namespace

Cmac::Cmac(const std::uint8_t* key) : aes_(key) {
  std::memset(k1_, 0, 16);
  aes_.encrypt_blocks(k1_, k1_, 1);
  double_block(k1_);
  std::memcpy(k2_, k1_, 16);
  double_block(k2_);
}

void Cmac::tag(const std::uint8_t* data, std::size_t n, std::uint8_t* out) const {
  const std::size_t full = n == 0 ? 0 : (n - 1) / 16;  // blocks before the last
  std::uint8_t x[16] = {};
  for (std::size_t i = 0; i < full; ++i) {
    for (int j = 0; j < 16; ++j) x[j] ^= data[16 * i + j];
    aes_.encrypt_blocks(x, x, 1);
  }
  const std::size_t rest = n - 16 * full;
  std::uint8_t last[16] = {};
  if (rest > 0) std::memcpy(last, data + 16 * full, rest);
  const std::uint8_t* sub = k1_;
  if (rest < 16) {
    last[rest] = 0x80;
    sub = k2_;
  }
  for (int j = 0; j < 16; ++j) x[j] ^= last[j] ^ sub[j];
  aes_.encrypt_blocks(x, out, 1);
}

void aes_cmac(const std::uint8_t* key, const std::uint8_t* data, std::size_t n,
              std::uint8_t* tag) {
  Cmac(key).tag(data, n, tag);
}

}  // namespace hornet::detail
