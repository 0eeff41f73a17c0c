#include "fpshield/profile.h"

#include <algorithm>

#include "fpshield/error.h"
#include "json.hpp"

namespace fpshield::profile {

namespace {

using nlohmann::json;

// Representative endpoints, not an exhaustive list of wrapped APIs.
constexpr std::string_view kShippedTable = R"json({
  "schema": 1,
  "groups": [
    {"name": "canvas", "fingerprintable": true, "endpoints": [
      "HTMLCanvasElement.prototype.toDataURL",
      "HTMLCanvasElement.prototype.toBlob",
      "CanvasRenderingContext2D.prototype.getImageData",
      "CanvasRenderingContext2D.prototype.isPointInPath",
      "CanvasRenderingContext2D.prototype.isPointInStroke",
      "OffscreenCanvas.prototype.convertToBlob"]},
    {"name": "webgl", "fingerprintable": true, "endpoints": [
      "WebGLRenderingContext.prototype.readPixels",
      "WebGLRenderingContext.prototype.getParameter",
      "WebGL2RenderingContext.prototype.readPixels",
      "WebGL2RenderingContext.prototype.getParameter"]},
    {"name": "audio", "fingerprintable": true, "endpoints": [
      "AudioBuffer.prototype.getChannelData",
      "AudioBuffer.prototype.copyFromChannel",
      "AnalyserNode.prototype.getByteTimeDomainData",
      "AnalyserNode.prototype.getFloatTimeDomainData",
      "AnalyserNode.prototype.getByteFrequencyData",
      "AnalyserNode.prototype.getFloatFrequencyData"]},
    {"name": "media_devices", "fingerprintable": true, "endpoints": [
      "MediaDevices.prototype.enumerateDevices"]},
    {"name": "hardware", "fingerprintable": true, "endpoints": [
      "navigator.hardwareConcurrency",
      "navigator.deviceMemory"]},
    {"name": "plugins", "fingerprintable": true, "endpoints": [
      "navigator.plugins",
      "navigator.mimeTypes"]},
    {"name": "time_precision", "fingerprintable": false, "endpoints": [
      "Performance.prototype.now",
      "Date.now",
      "Event.prototype.timeStamp",
      "Gamepad.prototype.timestamp",
      "Sensor.prototype.timestamp"]},
    {"name": "geolocation", "fingerprintable": false, "endpoints": [
      "Geolocation.prototype.getCurrentPosition",
      "Geolocation.prototype.watchPosition"]},
    {"name": "sensors", "fingerprintable": false, "endpoints": [
      "Magnetometer",
      "Accelerometer",
      "LinearAccelerationSensor",
      "GravitySensor",
      "Gyroscope",
      "AbsoluteOrientationSensor",
      "RelativeOrientationSensor",
      "AmbientLightSensor"]},
    {"name": "battery", "fingerprintable": false, "endpoints": [
      "navigator.getBattery"]},
    {"name": "gamepad", "fingerprintable": false, "endpoints": [
      "navigator.getGamepads"]},
    {"name": "xr", "fingerprintable": false, "endpoints": [
      "navigator.getVRDisplays",
      "XRSystem.prototype.requestSession"]},
    {"name": "network_info", "fingerprintable": false, "endpoints": [
      "navigator.connection"]},
    {"name": "vibration", "fingerprintable": false, "endpoints": [
      "navigator.vibrate"]}
  ],
  "profiles": {
    "p1": {"canvas": "little_lie", "webgl": "little_lie", "audio": "little_lie",
           "media_devices": "little_lie", "hardware": "little_lie",
           "plugins": "little_lie", "time_precision": "little_lie",
           "geolocation": "little_lie", "sensors": "little_lie",
           "battery": "block", "gamepad": "pass_through", "xr": "pass_through",
           "network_info": "pass_through", "vibration": "pass_through"},
    "p2": {"canvas": "pass_through", "webgl": "pass_through",
           "audio": "pass_through", "media_devices": "pass_through",
           "hardware": "pass_through", "plugins": "pass_through",
           "time_precision": "little_lie", "geolocation": "little_lie",
           "sensors": "little_lie", "battery": "block",
           "gamepad": "pass_through", "xr": "pass_through",
           "network_info": "pass_through", "vibration": "pass_through"},
    "p3": {"canvas": "fixed_fake", "webgl": "fixed_fake", "audio": "fixed_fake",
           "media_devices": "block", "hardware": "fixed_fake",
           "plugins": "fixed_fake", "time_precision": "little_lie",
           "geolocation": "block", "sensors": "block", "battery": "block",
           "gamepad": "block", "xr": "block", "network_info": "fixed_fake",
           "vibration": "block"}
  }
})json";

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok)
      throw ConfigError(where.empty() ? key : where + "." + key,
                        "unknown field");
  }
}

bool action_allowed(bool fingerprintable, ProfileId id, ActionKind kind) {
  if (!fingerprintable) return true;
  switch (id) {
    case ProfileId::kP1: return kind == ActionKind::kLittleLie;
    case ProfileId::kP2: return kind == ActionKind::kPassThrough;
    case ProfileId::kP3:
      return kind == ActionKind::kBlock || kind == ActionKind::kFixedFake;
  }
  return false;
}

}  // namespace

std::string_view to_string(ProfileId id) {
  switch (id) {
    case ProfileId::kP1: return "p1";
    case ProfileId::kP2: return "p2";
    case ProfileId::kP3: return "p3";
  }
  return "?";
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kLittleLie: return "little_lie";
    case ActionKind::kPassThrough: return "pass_through";
    case ActionKind::kBlock: return "block";
    case ActionKind::kFixedFake: return "fixed_fake";
  }
  return "?";
}

std::optional<ProfileId> parse_profile_id(std::string_view text) {
  for (auto id : {ProfileId::kP1, ProfileId::kP2, ProfileId::kP3})
    if (text == to_string(id)) return id;
  return std::nullopt;
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  for (auto k : {ActionKind::kLittleLie, ActionKind::kPassThrough,
                 ActionKind::kBlock, ActionKind::kFixedFake})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

ProfileTable ProfileTable::parse(std::string_view json_document) {
  json doc;
  try {
    doc = json::parse(json_document);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "expected an object");
  check_keys(doc, {"schema", "groups", "profiles"}, "");
  if (doc.value("schema", 0) != 1)
    throw ConfigError("schema", "unsupported schema version");

  ProfileTable table;
  std::map<std::string, std::string> endpoint_groups;
  if (!doc.contains("groups") || !doc["groups"].is_array())
    throw ConfigError("groups", "expected an array");
  for (std::size_t gi = 0; gi < doc["groups"].size(); ++gi) {
    const json& g = doc["groups"][gi];
    std::string where = "groups[" + std::to_string(gi) + "]";
    if (!g.is_object()) throw ConfigError(where, "expected an object");
    check_keys(g, {"name", "fingerprintable", "endpoints"}, where);
    EndpointGroup group;
    if (!g.contains("name") || !g["name"].is_string() ||
        g["name"].get<std::string>().empty())
      throw ConfigError(where + ".name", "expected a non-empty string");
    group.name = g["name"].get<std::string>();
    group.fingerprintable = g.value("fingerprintable", false);
    for (const auto& existing : table.groups_)
      if (existing.name == group.name)
        throw ConfigError(where + ".name", "duplicate group " + group.name);
    if (!g.contains("endpoints") || !g["endpoints"].is_array())
      throw ConfigError(where + ".endpoints", "expected an array");
    for (std::size_t ei = 0; ei < g["endpoints"].size(); ++ei) {
      const json& e = g["endpoints"][ei];
      std::string ewhere = where + ".endpoints[" + std::to_string(ei) + "]";
      if (!e.is_string() || e.get<std::string>().empty())
        throw ConfigError(ewhere, "expected a non-empty string");
      std::string ep = e.get<std::string>();
      if (!endpoint_groups.emplace(ep, group.name).second)
        throw ConfigError(ewhere, "endpoint " + ep + " listed twice");
      group.endpoints.push_back(std::move(ep));
    }
    table.groups_.push_back(std::move(group));
  }

  if (!doc.contains("profiles") || !doc["profiles"].is_object())
    throw ConfigError("profiles", "expected an object");
  for (auto id : {ProfileId::kP1, ProfileId::kP2, ProfileId::kP3}) {
    std::string where = "profiles." + std::string(to_string(id));
    if (!doc["profiles"].contains(to_string(id)))
      throw ConfigError(where, "missing profile");
    const json& p = doc["profiles"][std::string(to_string(id))];
    if (!p.is_object()) throw ConfigError(where, "expected an object");
    ProtectionProfile profile;
    profile.id = id;
    profile.endpoint_groups = endpoint_groups;
    for (const auto& [name, value] : p.items()) {
      auto it = std::find_if(table.groups_.begin(), table.groups_.end(),
                             [&](const auto& g) { return g.name == name; });
      if (it == table.groups_.end())
        throw ConfigError(where + "." + name, "unknown group");
      auto kind = value.is_string()
                      ? parse_action_kind(value.get<std::string>())
                      : std::nullopt;
      if (!kind) throw ConfigError(where + "." + name, "unknown action");
      if (!action_allowed(it->fingerprintable, id, *kind))
        throw ConfigError(where + "." + name,
                          std::string(to_string(*kind)) +
                              " is not allowed for a fingerprintable group in " +
                              std::string(to_string(id)));
      profile.group_actions[name] = ProtectionAction{*kind};
    }
    for (const auto& g : table.groups_)
      if (!profile.group_actions.contains(g.name))
        throw ConfigError(where + "." + g.name, "group has no action");
    table.profiles_[id] = std::move(profile);
  }
  for (const auto& [key, _] : doc["profiles"].items())
    if (!parse_profile_id(key))
      throw ConfigError("profiles." + key, "unknown profile");
  return table;
}

const ProfileTable& ProfileTable::shipped() {
  static const ProfileTable table = parse(kShippedTable);
  return table;
}

std::string_view ProfileTable::shipped_document() { return kShippedTable; }

const ProtectionProfile& ProfileTable::profile(ProfileId id) const {
  return profiles_.at(id);
}

std::vector<std::string> ProfileTable::endpoints() const {
  std::vector<std::string> out;
  for (const auto& g : groups_)
    out.insert(out.end(), g.endpoints.begin(), g.endpoints.end());
  return out;
}

ProtectionAction resolve_protection(const ProtectionProfile& profile,
                                    std::string_view endpoint) {
  auto g = profile.endpoint_groups.find(std::string(endpoint));
  if (g == profile.endpoint_groups.end()) return {ActionKind::kPassThrough};
  auto a = profile.group_actions.find(g->second);
  if (a == profile.group_actions.end()) return {ActionKind::kPassThrough};
  return a->second;
}

namespace fixed_fake {

farble::BitmapBuffer bitmap(uint32_t width, uint32_t height) {
  farble::BitmapBuffer out(width, height);
  std::fill(out.data.begin(), out.data.end(), 255);
  return out;
}

farble::AudioSamples audio(const farble::AudioSamples& shape) {
  farble::AudioSamples out;
  out.sample_rate = shape.sample_rate;
  out.channels.assign(shape.channels.size(),
                      std::vector<double>(shape.frames(), 0.0));
  return out;
}

farble::GlStringSet gl_strings() {
  return {"Mozilla", "Generic Renderer", "Generic Vendor", "Generic Renderer"};
}

}  // namespace fixed_fake

}  // namespace fpshield::profile
