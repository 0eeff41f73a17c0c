#include "fpshield/keyrand.h"

#include <openssl/rand.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "fpshield/error.h"
#include "fpshield/hex.h"

namespace fpshield::keyrand {

namespace {

constexpr std::size_t kBlockSize = 32;

Digest stream_block(const FarbleSeed& seed, uint64_t block) {
  return Sha256().update(seed.bytes()).update_le64(block).finish();
}

}  // namespace

SessionKey SessionKey::from_hex(std::string_view hex) {
  auto bytes = fpshield::from_hex(hex);
  if (!bytes || bytes->size() != kKeySize)
    throw InvalidArgument("session key must be exactly 64 hex characters");
  std::array<uint8_t, kKeySize> key{};
  std::memcpy(key.data(), bytes->data(), kKeySize);
  return SessionKey(key);
}

std::string SessionKey::to_hex() const { return fpshield::to_hex(bytes_); }

EntropySource system_entropy() {
  return [](std::span<uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
      throw SystemError("entropy source unavailable");
  };
}

SessionKey new_session_key() { return new_session_key(system_entropy()); }

SessionKey new_session_key(const EntropySource& entropy) {
  std::array<uint8_t, kKeySize> key{};
  entropy(key);
  return SessionKey(key);
}

FarbleSeed derive_seed(const SessionKey& session, const Origin& origin,
                       std::string_view tag) {
  if (tag.find('\0') != std::string_view::npos)
    throw InvalidArgument("domain tag must not contain NUL");
  Digest d = Sha256()
                 .update(session.bytes())
                 .update_byte(0)
                 .update(origin.value())
                 .update_byte(0)
                 .update(tag)
                 .finish();
  return FarbleSeed(d, std::string(tag));
}

FarbleSeed derive_subseed(const FarbleSeed& parent, std::string_view label) {
  if (label.find('\0') != std::string_view::npos)
    throw InvalidArgument("subseed label must not contain NUL");
  Digest d =
      Sha256().update(parent.bytes()).update_byte(0).update(label).finish();
  return FarbleSeed(d, parent.tag());
}

void keystream_fill(const FarbleSeed& seed, uint64_t offset,
                    std::span<uint8_t> out) {
  std::size_t written = 0;
  while (written < out.size()) {
    uint64_t pos = offset + written;
    uint64_t block = pos / kBlockSize;
    std::size_t within = pos % kBlockSize;
    Digest d = stream_block(seed, block);
    std::size_t n = std::min(kBlockSize - within, out.size() - written);
    std::memcpy(out.data() + written, d.data() + within, n);
    written += n;
  }
}

std::vector<uint8_t> keystream_bytes(const FarbleSeed& seed, uint64_t offset,
                                     std::size_t len) {
  std::vector<uint8_t> out(len);
  keystream_fill(seed, offset, out);
  return out;
}

namespace {

double word_to_unit(const uint8_t* p) {
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(p[i]) << (8 * i);
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

}  // namespace

double uniform01(const FarbleSeed& seed, uint64_t index) {
  // 8-byte words never straddle a 32-byte block.
  Digest d = stream_block(seed, index / 4);
  return word_to_unit(d.data() + (index % 4) * 8);
}

void uniform01_fill(const FarbleSeed& seed, uint64_t start,
                    std::span<double> out) {
  std::size_t k = 0;
  while (k < out.size()) {
    uint64_t index = start + k;
    Digest d = stream_block(seed, index / 4);
    for (uint64_t w = index % 4; w < 4 && k < out.size(); ++w, ++k)
      out[k] = word_to_unit(d.data() + w * 8);
  }
}

int64_t uniform_range(const FarbleSeed& seed, uint64_t index, int64_t lo,
                      int64_t hi) {
  if (lo > hi) throw InvalidArgument("uniform_range: lo > hi");
  // Plain double arithmetic so other implementations reproduce it exactly.
  double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
  double v = static_cast<double>(lo) + std::floor(uniform01(seed, index) * span);
  if (v >= static_cast<double>(hi)) return hi;
  return static_cast<int64_t>(v);
}

}  // namespace fpshield::keyrand
