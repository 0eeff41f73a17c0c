#include "fpshield/farble.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "fpshield/error.h"
#include "fpshield/hex.h"

namespace fpshield::farble {

using keyrand::FarbleSeed;

BitmapBuffer::BitmapBuffer(uint32_t w, uint32_t h)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h * 4, 0) {}

BitmapBuffer::BitmapBuffer(uint32_t w, uint32_t h, std::vector<uint8_t> rgba)
    : width(w), height(h), data(std::move(rgba)) {}

FarbleSeed content_seed(const FarbleSeed& seed, const Digest& content_hash) {
  Digest d = Sha256().update(seed.bytes()).update(content_hash).finish();
  return FarbleSeed(d, seed.tag());
}

namespace {

Digest bitmap_content_hash(const FarbleSeed& seed, const BitmapBuffer& in) {
  return Sha256()
      .update(seed.bytes())
      .update_le32(in.width)
      .update_le32(in.height)
      .update(in.data)
      .finish();
}

void require_consistent(const BitmapBuffer& in) {
  if (!in.consistent()) {
    throw InvalidArgument("bitmap of " + std::to_string(in.width) + "x" +
                          std::to_string(in.height) + " needs " +
                          std::to_string(in.expected_size()) + " bytes, got " +
                          std::to_string(in.data.size()));
  }
}

// Calls fn(byte_index, bit) for every colour byte of the bitmap.
template <typename Fn>
void for_each_mask_bit(const FarbleSeed& seed, const BitmapBuffer& in,
                       Fn&& fn) {
  FarbleSeed second = content_seed(seed, bitmap_content_hash(seed, in));
  const std::size_t pixels = in.data.size() / 4;
  const std::size_t colour_bytes = pixels * 3;
  std::vector<uint8_t> mask = keyrand::keystream_bytes(
      second, 0, (colour_bytes + 7) / 8);
  for (std::size_t n = 0; n < colour_bytes; ++n) {
    uint8_t bit = (mask[n / 8] >> (n % 8)) & 1;
    fn((n / 3) * 4 + n % 3, bit);
  }
}

Digest audio_content_hash(const FarbleSeed& seed, const AudioSamples& in) {
  Sha256 h;
  h.update(seed.bytes())
      .update_le32(in.sample_rate)
      .update_le32(static_cast<uint32_t>(in.channels.size()))
      .update_le32(static_cast<uint32_t>(in.frames()));
  for (const auto& ch : in.channels)
    for (double s : ch) h.update_le64(std::bit_cast<uint64_t>(s));
  return h.finish();
}

constexpr std::string_view kGlCharset =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789 ";

std::string gl_string(const FarbleSeed& seed, uint64_t base) {
  auto len = keyrand::uniform_range(seed, base, 8, 32);
  std::string out;
  out.reserve(static_cast<std::size_t>(len));
  for (int64_t j = 0; j < len; ++j) {
    auto c = keyrand::uniform_range(seed, base + 1 + j, 0,
                                    static_cast<int64_t>(kGlCharset.size()) - 1);
    out.push_back(kGlCharset[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace

BitmapBuffer farble_bitmap(const FarbleSeed& seed, const BitmapBuffer& input) {
  require_consistent(input);
  BitmapBuffer out = input;
  for_each_mask_bit(seed, input, [&](std::size_t at, uint8_t bit) {
    out.data[at] ^= bit;
  });
  return out;
}

std::vector<uint8_t> bitmap_mask(const FarbleSeed& seed,
                                 const BitmapBuffer& input) {
  require_consistent(input);
  std::vector<uint8_t> mask(input.data.size(), 0);
  for_each_mask_bit(seed, input,
                    [&](std::size_t at, uint8_t bit) { mask[at] = bit; });
  return mask;
}

AudioSamples farble_audio(const FarbleSeed& seed, const AudioSamples& input) {
  const std::size_t frames = input.frames();
  for (std::size_t c = 0; c < input.channels.size(); ++c) {
    if (input.channels[c].size() != frames)
      throw InvalidArgument("audio channel " + std::to_string(c) +
                            " has a different length");
    for (double s : input.channels[c])
      if (!std::isfinite(s))
        throw InvalidArgument("audio channel " + std::to_string(c) +
                              " holds a non-finite sample");
  }

  FarbleSeed second = content_seed(seed, audio_content_hash(seed, input));
  AudioSamples out = input;
  uint64_t i = 0;
  std::vector<double> u(frames);
  for (auto& ch : out.channels) {
    keyrand::uniform01_fill(second, i, u);
    i += frames;
    for (std::size_t k = 0; k < frames; ++k)
      ch[k] = std::clamp(ch[k] + (u[k] - 0.5) * 2 * kAudioEpsilon, -1.0, 1.0);
  }
  return out;
}

GlStringSet spoof_gl_strings(const FarbleSeed& seed) {
  return {gl_string(seed, 0), gl_string(seed, 64), gl_string(seed, 128),
          gl_string(seed, 192)};
}

std::vector<std::string> spoof_device_ids(const FarbleSeed& seed,
                                          std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  uint8_t raw[32];
  for (std::size_t i = 0; i < count; ++i) {
    keyrand::keystream_fill(seed, 32 * static_cast<uint64_t>(i), raw);
    ids.push_back(base64url(raw));
  }
  return ids;
}

}  // namespace fpshield::farble
