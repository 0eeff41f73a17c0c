#ifndef FPSHIELD_HEX_H_
#define FPSHIELD_HEX_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpshield {

std::string to_hex(std::span<const uint8_t> bytes);

// Accepts upper- or lower-case digits. Returns nullopt on odd length or a
// non-hex character.
std::optional<std::vector<uint8_t>> from_hex(std::string_view text);

// RFC 4648 section 5 alphabet, no padding.
std::string base64url(std::span<const uint8_t> bytes);

}  // namespace fpshield

#endif  // FPSHIELD_HEX_H_
