#ifndef FPSHIELD_SHA256_H_
#define FPSHIELD_SHA256_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

namespace fpshield {

using Digest = std::array<uint8_t, 32>;

// Incremental SHA-256. Thin RAII wrapper over the OpenSSL EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const uint8_t> data);
  Sha256& update(std::string_view data);
  Sha256& update_byte(uint8_t b);
  Sha256& update_le32(uint32_t v);
  Sha256& update_le64(uint64_t v);

  // Finalizes and returns the digest. The hasher must not be reused.
  Digest finish();

  static Digest hash(std::span<const uint8_t> data);

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

}  // namespace fpshield

#endif  // FPSHIELD_SHA256_H_
