#ifndef FPSHIELD_FARBLE_H_
#define FPSHIELD_FARBLE_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fpshield/keyrand.h"

// Little-lies transforms. Each transform is deterministic in (seed, input):
// the same origin reading the same content in the same session always sees
// the same lie, and a different origin sees a different one.
namespace fpshield::farble {

// Row-major RGBA8.
struct BitmapBuffer {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> data;

  BitmapBuffer() = default;
  BitmapBuffer(uint32_t w, uint32_t h);
  BitmapBuffer(uint32_t w, uint32_t h, std::vector<uint8_t> rgba);

  std::size_t expected_size() const {
    return static_cast<std::size_t>(width) * height * 4;
  }
  bool consistent() const { return data.size() == expected_size(); }

  friend bool operator==(const BitmapBuffer&, const BitmapBuffer&) = default;
};

struct AudioSamples {
  uint32_t sample_rate = 0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const {
    return channels.empty() ? 0 : channels.front().size();
  }

  friend bool operator==(const AudioSamples&, const AudioSamples&) = default;
};

inline constexpr double kAudioEpsilon = 1e-7;

// Two-pass content-keyed bitmap farbling.
//
// Pass 1: ch = SHA-256(seed || LE32(width) || LE32(height) || data).
// Pass 2: mask = keystream(SHA-256(seed || ch)). The n-th colour byte
// (n = 3 * pixel + channel, channel in {R, G, B}) has its least significant
// bit XORed with bit (n % 8) of mask byte n / 8. Alpha is never touched.
//
// Throws InvalidArgument if the buffer length does not match its size.
BitmapBuffer farble_bitmap(const keyrand::FarbleSeed& seed,
                           const BitmapBuffer& input);

// The XOR mask farble_bitmap would apply to |input|: one byte per RGBA byte,
// 0 or 1 for colour bytes and always 0 for alpha.
std::vector<uint8_t> bitmap_mask(const keyrand::FarbleSeed& seed,
                                 const BitmapBuffer& input);

// Content hash: SHA-256(seed || LE32(rate) || LE32(channels) || LE32(frames)
// || channel-major LE64 IEEE-754 samples). Sample i (channel-major) becomes
// clamp(s + (u(seed', i) - 0.5) * 2 * eps, -1, 1) with seed' =
// SHA-256(seed || ch).
//
// Throws InvalidArgument on ragged channels or non-finite samples.
AudioSamples farble_audio(const keyrand::FarbleSeed& seed,
                          const AudioSamples& input);

// The per-content seed both transforms use for their second pass.
keyrand::FarbleSeed content_seed(const keyrand::FarbleSeed& seed,
                                 const Digest& content_hash);

struct GlStringSet {
  std::string vendor;
  std::string renderer;
  std::string unmasked_vendor;
  std::string unmasked_renderer;

  friend bool operator==(const GlStringSet&, const GlStringSet&) = default;
};

// String k (vendor, renderer, unmasked vendor, unmasked renderer) reads
// uniform indices [64k, 64k + 33): its length from index 64k in [8, 32] and
// character j from index 64k + 1 + j over [A-Za-z0-9 ].
GlStringSet spoof_gl_strings(const keyrand::FarbleSeed& seed);

// Identifier i is the unpadded base64url encoding of keystream bytes
// [32i, 32i + 32), i.e. 43 characters.
std::vector<std::string> spoof_device_ids(const keyrand::FarbleSeed& seed,
                                          std::size_t count);

}  // namespace fpshield::farble

#endif  // FPSHIELD_FARBLE_H_
