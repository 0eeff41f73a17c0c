#include "fpshield/media_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fpshield/error.h"

namespace fpshield::media {

namespace {

uint32_t read_le32(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint32_t>(b[at]) | static_cast<uint32_t>(b[at + 1]) << 8 |
         static_cast<uint32_t>(b[at + 2]) << 16 |
         static_cast<uint32_t>(b[at + 3]) << 24;
}

void put_le32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

}  // namespace

farble::BitmapBuffer decode_bitmap(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8) throw InvalidArgument("bitmap file shorter than header");
  farble::BitmapBuffer bmp;
  bmp.width = read_le32(bytes, 0);
  bmp.height = read_le32(bytes, 4);
  if (bytes.size() - 8 != bmp.expected_size()) {
    throw InvalidArgument("bitmap file holds " +
                          std::to_string(bytes.size() - 8) +
                          " pixel bytes, header implies " +
                          std::to_string(bmp.expected_size()));
  }
  bmp.data.assign(bytes.begin() + 8, bytes.end());
  return bmp;
}

std::vector<uint8_t> encode_bitmap(const farble::BitmapBuffer& bitmap) {
  if (!bitmap.consistent())
    throw InvalidArgument("bitmap length does not match its dimensions");
  std::vector<uint8_t> out;
  out.reserve(8 + bitmap.data.size());
  put_le32(out, bitmap.width);
  put_le32(out, bitmap.height);
  out.insert(out.end(), bitmap.data.begin(), bitmap.data.end());
  return out;
}

farble::AudioSamples decode_audio(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12) throw InvalidArgument("audio file shorter than header");
  farble::AudioSamples audio;
  audio.sample_rate = read_le32(bytes, 0);
  const uint32_t channels = read_le32(bytes, 4);
  const uint32_t frames = read_le32(bytes, 8);
  const uint64_t expected = 4ull * channels * frames;
  if (bytes.size() - 12 != expected)
    throw InvalidArgument("audio file payload does not match its header");
  audio.channels.assign(channels, std::vector<double>(frames));
  std::size_t at = 12;
  for (uint32_t f = 0; f < frames; ++f) {
    for (uint32_t c = 0; c < channels; ++c, at += 4) {
      audio.channels[c][f] = std::bit_cast<float>(read_le32(bytes, at));
    }
  }
  return audio;
}

std::vector<uint8_t> encode_audio(const farble::AudioSamples& audio) {
  const std::size_t frames = audio.frames();
  for (const auto& ch : audio.channels)
    if (ch.size() != frames)
      throw InvalidArgument("audio channels differ in length");
  std::vector<uint8_t> out;
  out.reserve(12 + 4 * frames * audio.channels.size());
  put_le32(out, audio.sample_rate);
  put_le32(out, static_cast<uint32_t>(audio.channels.size()));
  put_le32(out, static_cast<uint32_t>(frames));
  for (std::size_t f = 0; f < frames; ++f)
    for (const auto& ch : audio.channels)
      put_le32(out, std::bit_cast<uint32_t>(static_cast<float>(ch[f])));
  return out;
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("short write to " + path.string());
}

}  // namespace fpshield::media
