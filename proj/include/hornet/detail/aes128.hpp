#pragma once

// AES-128 with a key schedule that is cheap to set up, so that per-packet
// keys can be used directly. Uses AES-NI when the CPU has it and OpenSSL
// otherwise; both backends produce identical output.

#include <cstddef>
#include <cstdint>
#include <memory>

namespace hornet::detail {

enum class AesBackend { kAuto, kHardware, kOpenSsl };

// Selects the backend for subsequently constructed ciphers. kHardware falls
// back to kOpenSsl when the CPU lacks AES instructions. Test hook.
void set_aes_backend(AesBackend backend);
AesBackend active_aes_backend();
bool hardware_aes_available();

class Aes128 {
 public:
  explicit Aes128(const std::uint8_t* key);
  ~Aes128();
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;

  void encrypt_blocks(const std::uint8_t* in, std::uint8_t* out, std::size_t blocks) const;
  void decrypt_block(const std::uint8_t* in, std::uint8_t* out) const;
  // XORs the CTR keystream starting at counter block `iv` (incremented as a
  // 128-bit big-endian integer) into data[0..n).
  void ctr_xor(const std::uint8_t* iv, std::uint8_t* data, std::size_t n) const;

 private:
  struct Impl;
  alignas(16) unsigned char storage_[2 * 11 * 16 + 16];
  bool hardware_ = false;
  std::unique_ptr<Impl> soft_;
};

// AES-CMAC (RFC 4493), 16-byte tags. One instance can tag many messages.
class Cmac {
 public:
  explicit Cmac(const std::uint8_t* key);
  void tag(const std::uint8_t* data, std::size_t n, std::uint8_t* out) const;

 private:
  Aes128 aes_;
  std::uint8_t k1_[16];
  std::uint8_t k2_[16];
};

void aes_cmac(const std::uint8_t* key, const std::uint8_t* data, std::size_t n,
              std::uint8_t* tag);

}  // namespace hornet::detail
