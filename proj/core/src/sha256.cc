#include "fpshield/sha256.h"

#include <openssl/evp.h>

#include "fpshield/error.h"

namespace fpshield {

struct Sha256::Ctx {
  EVP_MD_CTX* md = nullptr;
  ~Ctx() { EVP_MD_CTX_free(md); }
};

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  ctx_->md = EVP_MD_CTX_new();
  if (ctx_->md == nullptr ||
      EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    throw SystemError("SHA-256 context initialization failed");
  }
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(std::span<const uint8_t> data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update(std::string_view data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update_byte(uint8_t b) {
  EVP_DigestUpdate(ctx_->md, &b, 1);
  return *this;
}

Sha256& Sha256::update_le32(uint32_t v) {
  uint8_t buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
  EVP_DigestUpdate(ctx_->md, buf, sizeof(buf));
  return *this;
}

Sha256& Sha256::update_le64(uint64_t v) {
  uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
  EVP_DigestUpdate(ctx_->md, buf, sizeof(buf));
  return *this;
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx_->md, out.data(), &len);
  return out;
}

Digest Sha256::hash(std::span<const uint8_t> data) {
  return Sha256().update(data).finish();
}

}  // namespace fpshield
