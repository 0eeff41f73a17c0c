#ifndef FPSHIELD_MEDIA_IO_H_
#define FPSHIELD_MEDIA_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fpshield/farble.h"

// Raw payload file formats.
//
//   bitmap: LE32 width | LE32 height | width*height*4 RGBA bytes
//   audio:  LE32 rate | LE32 channels | LE32 frames |
//           channels*frames float32 LE samples, interleaved by frame
namespace fpshield::media {

farble::BitmapBuffer decode_bitmap(std::span<const uint8_t> bytes);
std::vector<uint8_t> encode_bitmap(const farble::BitmapBuffer& bitmap);

farble::AudioSamples decode_audio(std::span<const uint8_t> bytes);
std::vector<uint8_t> encode_audio(const farble::AudioSamples& audio);

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const uint8_t> bytes);

}  // namespace fpshield::media

#endif  // FPSHIELD_MEDIA_IO_H_
