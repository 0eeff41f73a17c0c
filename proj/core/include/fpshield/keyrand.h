#ifndef FPSHIELD_KEYRAND_H_
#define FPSHIELD_KEYRAND_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpshield/origin.h"
#include "fpshield/sha256.h"

// Keyed, domain-separated randomness. Every perturbation the engine makes is
// a pure function of a FarbleSeed, and every FarbleSeed is a pure function of
// (session key, origin, domain tag):
//
//   seed      = SHA-256(session || 0x00 || origin || 0x00 || tag)
//   block(j)  = SHA-256(seed || LE64(j))
//   stream[i] = block(i / 32)[i % 32]
//   u(k)      = (LE64(stream[8k .. 8k+8]) >> 11) * 2^-53
//
// The constructions are bit-exact; tests/vectors/keyrand_vectors.json pins
// reference outputs for cross-language conformance.
namespace fpshield::keyrand {

inline constexpr std::size_t kKeySize = 32;

class SessionKey {
 public:
  explicit SessionKey(const std::array<uint8_t, kKeySize>& bytes)
      : bytes_(bytes) {}

  // Throws InvalidArgument unless |hex| is exactly 64 hex characters.
  static SessionKey from_hex(std::string_view hex);
  std::string to_hex() const;

  std::span<const uint8_t, kKeySize> bytes() const { return bytes_; }

  friend bool operator==(const SessionKey&, const SessionKey&) = default;

 private:
  std::array<uint8_t, kKeySize> bytes_;
};

// Fills the span with entropy or throws SystemError.
using EntropySource = std::function<void(std::span<uint8_t>)>;

// The process CSPRNG (OpenSSL RAND_bytes).
EntropySource system_entropy();

SessionKey new_session_key();
SessionKey new_session_key(const EntropySource& entropy);

// Domain tags used by the engine. Any NUL-free string is a valid tag.
namespace tags {
inline constexpr std::string_view kCanvas = "canvas";
inline constexpr std::string_view kAudio = "audio";
inline constexpr std::string_view kWebGl = "webgl";
inline constexpr std::string_view kDevices = "devices";
inline constexpr std::string_view kGeolocation = "geo";
inline constexpr std::string_view kTime = "time";
inline constexpr std::string_view kSensors = "sensor";
}  // namespace tags

class FarbleSeed {
 public:
  FarbleSeed(const Digest& bytes, std::string tag)
      : bytes_(bytes), tag_(std::move(tag)) {}

  std::span<const uint8_t, 32> bytes() const { return bytes_; }
  const Digest& digest() const { return bytes_; }
  const std::string& tag() const { return tag_; }

  friend bool operator==(const FarbleSeed&, const FarbleSeed&) = default;

 private:
  Digest bytes_;
  std::string tag_;
};

// Throws InvalidArgument if |tag| contains a NUL byte.
FarbleSeed derive_seed(const SessionKey& session, const Origin& origin,
                       std::string_view tag);

// Seed for a sub-purpose of an existing seed:
// SHA-256(parent || 0x00 || label). Keeps the parent's tag.
FarbleSeed derive_subseed(const FarbleSeed& parent, std::string_view label);

// Random access into the counter-mode stream.
std::vector<uint8_t> keystream_bytes(const FarbleSeed& seed, uint64_t offset,
                                     std::size_t len);
void keystream_fill(const FarbleSeed& seed, uint64_t offset,
                    std::span<uint8_t> out);

double uniform01(const FarbleSeed& seed, uint64_t index);
// out[k] = uniform01(seed, start + k), sharing keystream blocks.
void uniform01_fill(const FarbleSeed& seed, uint64_t start, std::span<double> out);

// lo + floor(u * (hi - lo + 1)), clamped to hi. Throws if lo > hi.
// Computed in doubles for portability; spans past 2^53 are not uniform.
int64_t uniform_range(const FarbleSeed& seed, uint64_t index, int64_t lo,
                      int64_t hi);

// Sequential reader over uniform01 indices. Convenient when a generator
// consumes a variable number of draws.
class UniformCursor {
 public:
  explicit UniformCursor(const FarbleSeed& seed, uint64_t start = 0)
      : seed_(seed), next_(start) {}

  double next01() { return uniform01(seed_, next_++); }
  double next_in(double lo, double hi) { return lo + (hi - lo) * next01(); }
  int64_t next_range(int64_t lo, int64_t hi) {
    return uniform_range(seed_, next_++, lo, hi);
  }
  uint64_t position() const { return next_; }

 private:
  FarbleSeed seed_;
  uint64_t next_;
};

}  // namespace fpshield::keyrand

#endif  // FPSHIELD_KEYRAND_H_
