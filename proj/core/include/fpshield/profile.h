#ifndef FPSHIELD_PROFILE_H_
#define FPSHIELD_PROFILE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpshield/farble.h"

// Protection profiles: which action applies to each group of endpoints.
//
//   p1  little lies on fingerprintable groups (default)
//   p2  fingerprintable groups pass through; other protections stay on
//   p3  fingerprintable groups are blocked or replaced by fixed fakes
namespace fpshield::profile {

enum class ProfileId { kP1, kP2, kP3 };

enum class ActionKind { kLittleLie, kPassThrough, kBlock, kFixedFake };

struct ProtectionAction {
  ActionKind kind = ActionKind::kPassThrough;
  friend bool operator==(const ProtectionAction&,
                         const ProtectionAction&) = default;
};

std::string_view to_string(ProfileId id);
std::string_view to_string(ActionKind kind);
std::optional<ProfileId> parse_profile_id(std::string_view text);
std::optional<ActionKind> parse_action_kind(std::string_view text);

struct EndpointGroup {
  std::string name;
  bool fingerprintable = false;
  std::vector<std::string> endpoints;
};

struct ProtectionProfile {
  ProfileId id = ProfileId::kP1;
  std::map<std::string, ProtectionAction> group_actions;
  std::map<std::string, std::string> endpoint_groups;
};

class ProfileTable {
 public:
  // Parses and validates a profile table document. Throws ConfigError with
  // the location of the first problem.
  static ProfileTable parse(std::string_view json_document);

  // The table compiled into the library.
  static const ProfileTable& shipped();
  static std::string_view shipped_document();

  const std::vector<EndpointGroup>& groups() const { return groups_; }
  const ProtectionProfile& profile(ProfileId id) const;
  std::vector<std::string> endpoints() const;

 private:
  std::vector<EndpointGroup> groups_;
  std::map<ProfileId, ProtectionProfile> profiles_;
};

// Unknown endpoints pass through.
ProtectionAction resolve_protection(const ProtectionProfile& profile,
                                    std::string_view endpoint);

// Endpoints the CLI farble/spoof subcommands stand in for.
namespace endpoints {
inline constexpr std::string_view kCanvasRead =
    "HTMLCanvasElement.prototype.toDataURL";
inline constexpr std::string_view kAudioRead =
    "AudioBuffer.prototype.getChannelData";
inline constexpr std::string_view kWebGlParameter =
    "WebGLRenderingContext.prototype.getParameter";
inline constexpr std::string_view kEnumerateDevices =
    "MediaDevices.prototype.enumerateDevices";
inline constexpr std::string_view kGeolocation =
    "Geolocation.prototype.getCurrentPosition";
inline constexpr std::string_view kPerformanceNow =
    "Performance.prototype.now";
inline constexpr std::string_view kMagnetometer = "Magnetometer";
}  // namespace endpoints

// Values returned under FixedFake. Project defaults: plausible but rare.
namespace fixed_fake {
// Opaque white canvas of the requested size.
farble::BitmapBuffer bitmap(uint32_t width, uint32_t height);
// Digital silence with the input's shape.
farble::AudioSamples audio(const farble::AudioSamples& shape);
farble::GlStringSet gl_strings();
}  // namespace fixed_fake

}  // namespace fpshield::profile

#endif  // FPSHIELD_PROFILE_H_
