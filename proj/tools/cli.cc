#include "cli.h"

#include <signal.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpshield/error.h"
#include "fpshield/farble.h"
#include "fpshield/fpd.h"
#include "fpshield/geolocation.h"
#include "fpshield/hex.h"
#include "fpshield/keyrand.h"
#include "fpshield/media_io.h"
#include "fpshield/nbs.h"
#include "fpshield/origin_context.h"
#include "fpshield/profile.h"
#include "fpshield/proxy.h"
#include "fpshield/sensorsim.h"
#include "fpshield/version.h"
#include "json.hpp"

namespace fpshield::cli {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest text that reads back as the same double.
std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Globals {
  std::string session_hex;
  std::string origin;
  std::string profile = "p1";
};

struct Env {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  Globals globals;

  keyrand::SessionKey session() const {
    if (!globals.session_hex.empty())
      return keyrand::SessionKey::from_hex(globals.session_hex);
    auto key = keyrand::new_session_key();
    err << "session: " << key.to_hex() << '\n';
    return key;
  }

  OriginContext context() const {
    if (globals.origin.empty()) throw UsageError("--origin is required");
    return OriginContext(session(), Origin::parse(globals.origin));
  }

  const profile::ProtectionProfile& protection() const {
    return profile::ProfileTable::shipped().profile(
        *profile::parse_profile_id(globals.profile));
  }

  profile::ActionKind action_for(std::string_view endpoint) const {
    auto kind = profile::resolve_protection(protection(), endpoint).kind;
    err << "action: " << profile::to_string(kind) << '\n';
    return kind;
  }
};

void emit_bytes(Env& env, const std::string& path,
                std::span<const uint8_t> bytes) {
  if (path.empty() || path == "-") {
    env.out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
  } else {
    media::write_file(path, bytes);
  }
}

std::string read_text(const std::string& path) {
  auto bytes = media::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

// ---- farble ---------------------------------------------------------------

void farble_canvas(Env& env, const std::string& in, const std::string& out) {
  auto ctx = env.context();
  auto input = media::decode_bitmap(media::read_file(in));
  switch (env.action_for(profile::endpoints::kCanvasRead)) {
    case profile::ActionKind::kLittleLie:
      emit_bytes(env, out, media::encode_bitmap(farble::farble_bitmap(
                               ctx.seed(keyrand::tags::kCanvas), input)));
      break;
    case profile::ActionKind::kPassThrough:
      emit_bytes(env, out, media::encode_bitmap(input));
      break;
    case profile::ActionKind::kFixedFake:
      emit_bytes(env, out,
                 media::encode_bitmap(
                     profile::fixed_fake::bitmap(input.width, input.height)));
      break;
    case profile::ActionKind::kBlock:
      break;
  }
}

void farble_audio(Env& env, const std::string& in, const std::string& out) {
  auto ctx = env.context();
  auto input = media::decode_audio(media::read_file(in));
  switch (env.action_for(profile::endpoints::kAudioRead)) {
    case profile::ActionKind::kLittleLie:
      emit_bytes(env, out, media::encode_audio(farble::farble_audio(
                               ctx.seed(keyrand::tags::kAudio), input)));
      break;
    case profile::ActionKind::kPassThrough:
      emit_bytes(env, out, media::encode_audio(input));
      break;
    case profile::ActionKind::kFixedFake:
      emit_bytes(env, out,
                 media::encode_audio(profile::fixed_fake::audio(input)));
      break;
    case profile::ActionKind::kBlock:
      break;
  }
}

// ---- spoof ----------------------------------------------------------------

void spoof_webgl(Env& env) {
  auto ctx = env.context();
  auto kind = env.action_for(profile::endpoints::kWebGlParameter);
  ordered_json doc;
  doc["action"] = profile::to_string(kind);
  std::optional<farble::GlStringSet> set;
  if (kind == profile::ActionKind::kLittleLie)
    set = farble::spoof_gl_strings(ctx.seed(keyrand::tags::kWebGl));
  else if (kind == profile::ActionKind::kFixedFake)
    set = profile::fixed_fake::gl_strings();
  if (set) {
    doc["vendor"] = set->vendor;
    doc["renderer"] = set->renderer;
    doc["unmasked_vendor"] = set->unmasked_vendor;
    doc["unmasked_renderer"] = set->unmasked_renderer;
  }
  env.out << doc.dump(2) << '\n';
}

void spoof_devices(Env& env, std::size_t count) {
  auto ctx = env.context();
  auto kind = env.action_for(profile::endpoints::kEnumerateDevices);
  ordered_json doc;
  doc["action"] = profile::to_string(kind);
  if (kind == profile::ActionKind::kLittleLie)
    doc["device_ids"] =
        farble::spoof_device_ids(ctx.seed(keyrand::tags::kDevices), count);
  else if (kind == profile::ActionKind::kFixedFake)
    doc["device_ids"] = std::vector<std::string>(count, "");
  env.out << doc.dump(2) << '\n';
}

void spoof_geo(Env& env, const farble::GeoCoordinate& c, double precision_m) {
  auto ctx = env.context();
  auto kind = env.action_for(profile::endpoints::kGeolocation);
  if (!farble::is_valid(c)) throw InvalidArgument("coordinate out of range");
  ordered_json doc;
  doc["action"] = profile::to_string(kind);
  std::optional<farble::GeoCoordinate> res;
  if (kind == profile::ActionKind::kLittleLie)
    res = farble::degrade_geolocation(ctx.seed(keyrand::tags::kGeolocation), c,
                                      precision_m);
  else if (kind == profile::ActionKind::kPassThrough)
    res = c;
  if (res) {
    doc["latitude"] = res->latitude;
    doc["longitude"] = res->longitude;
    doc["accuracy"] = res->accuracy;
  }
  env.out << doc.dump(2) << '\n';
}

// ---- sensors --------------------------------------------------------------

std::string_view sensor_endpoint(sensors::SensorKind kind) {
  using sensors::SensorKind;
  switch (kind) {
    case SensorKind::kMagnetometer: return "Magnetometer";
    case SensorKind::kAccelerometer: return "Accelerometer";
    case SensorKind::kLinearAcceleration: return "LinearAccelerationSensor";
    case SensorKind::kGravity: return "GravitySensor";
    case SensorKind::kGyroscope: return "Gyroscope";
    case SensorKind::kAbsoluteOrientation: return "AbsoluteOrientationSensor";
    case SensorKind::kRelativeOrientation: return "RelativeOrientationSensor";
    case SensorKind::kAmbientLight: return "AmbientLightSensor";
  }
  return {};
}

std::vector<std::string> sensor_columns(const sensors::SensorReading& r) {
  if (r.dims == 1) return {"lux"};
  if (r.dims == 4) return {"x", "y", "z", "w"};
  return {"x", "y", "z"};
}

void sensors_gen(Env& env, const std::string& kind_name, double rate_hz,
                 double duration_s, const std::string& format) {
  auto kind = sensors::parse_sensor_kind(kind_name);
  if (!kind) throw UsageError("unknown sensor kind: " + kind_name);
  if (!(rate_hz > 0) || !std::isfinite(rate_hz))
    throw InvalidArgument("--rate must be > 0");
  if (!(duration_s >= 0) || !std::isfinite(duration_s))
    throw InvalidArgument("--duration must be >= 0");
  auto ctx = env.context();
  if (env.action_for(sensor_endpoint(*kind)) != profile::ActionKind::kLittleLie)
    return;

  auto state = ctx.device_state();
  const auto n = static_cast<uint64_t>(std::floor(rate_hz * duration_s));
  bool header = format == "csv";
  for (uint64_t i = 0; i < n; ++i) {
    const double t_ms = static_cast<double>(i) * 1000.0 / rate_hz;
    auto r = sensors::sample(state, *kind, t_ms);
    auto cols = sensor_columns(r);
    if (format == "csv") {
      if (header) {
        env.out << "t_ms";
        for (const auto& c : cols) env.out << ',' << c;
        env.out << '\n';
        header = false;
      }
      env.out << num(r.timestamp_ms);
      for (int k = 0; k < r.dims; ++k) env.out << ',' << num(r.value[k]);
      env.out << '\n';
    } else {
      ordered_json line;
      line["t_ms"] = r.timestamp_ms;
      for (int k = 0; k < r.dims; ++k) line[cols[k]] = r.value[k];
      env.out << line.dump() << '\n';
    }
  }
}

// ---- time -----------------------------------------------------------------

void time_shield(Env& env, double quantum_ms, bool randomize) {
  timeshield::ShieldConfig cfg{quantum_ms, randomize};
  timeshield::validate(cfg);
  auto ctx = env.context();
  OriginContext shielded(ctx.session(), ctx.origin(), cfg);
  const bool lie = env.action_for(profile::endpoints::kPerformanceNow) ==
                   profile::ActionKind::kLittleLie;
  std::string line;
  for (uint64_t lineno = 1; std::getline(env.in, line); ++lineno) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view text(line.data() + first, last - first + 1);
    double t = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), t);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw InvalidArgument("line " + std::to_string(lineno) +
                            ": not a number: " + std::string(text));
    env.out << num(lie ? shielded.time_shield().shield(t) : t) << '\n';
  }
}

// ---- fpd ------------------------------------------------------------------

int fpd_analyze(Env& env, const std::string& trace_path,
                const std::string& config_path, const std::string& mode_name,
                const std::string& report_path, bool json) {
  auto mode = fpd::parse_mode(mode_name);
  auto trace = fpd::parse_trace(read_text(trace_path));
  std::optional<fpd::FpdConfig> custom;
  if (!config_path.empty())
    custom = fpd::FpdConfig::parse(read_text(config_path));
  const auto& cfg = custom ? *custom : fpd::FpdConfig::shipped();

  auto state = fpd::replay(trace);
  auto verdict = fpd::evaluate(state, cfg);
  auto report = fpd::render_report(state, cfg, verdict);
  if (!report_path.empty()) {
    auto text = report.to_json() + "\n";
    media::write_file(report_path,
                      {reinterpret_cast<const uint8_t*>(text.data()),
                       text.size()});
  }
  env.out << (json ? report.to_json() + "\n" : report.to_text());
  if (*mode == fpd::Mode::kNotify && verdict.detected)
    env.out << "notify: fingerprinting detected on "
            << (report.page.empty() ? "page" : report.page) << '\n';
  for (auto d : fpd::block_directives(verdict, *mode))
    env.out << "directive: " << fpd::to_string(d) << '\n';
  return kExitOk;
}

// ---- nbs ------------------------------------------------------------------

std::string_view decision_label(nbs::DecisionKind k) {
  switch (k) {
    case nbs::DecisionKind::kAllow: return "Allow";
    case nbs::DecisionKind::kAllowAndLearn: return "AllowAndLearn";
    case nbs::DecisionKind::kBlock: return "Block";
  }
  return {};
}

void nbs_check(Env& env, const std::string& origin_class,
               const std::string& target_text, const std::string& resolved,
               const std::string& mode_name) {
  auto src = nbs::parse_address_class(origin_class);
  auto mode = nbs::parse_mode(mode_name);
  auto target = nbs::parse_target(target_text);
  std::optional<nbs::IpAddress> ip;
  if (!resolved.empty()) ip = nbs::IpAddress::parse(resolved);
  nbs::LearnCache cache;
  auto d = nbs::decide(*mode, *src, target.host, ip, cache);
  env.out << decision_label(d.kind) << '\n';
  if (d.target_class)
    env.out << "class: " << nbs::to_string(*d.target_class) << '\n';
  if (!d.reason.empty()) env.out << "reason: " << d.reason << '\n';
}

void nbs_proxy(Env& env, const std::string& listen,
               const std::string& mode_name, const std::string& origin_class,
               const std::string& log_path) {
  // parse_target refuses port 0, which here means "pick one".
  auto colon = listen.rfind(':');
  uint16_t port_arg = 0;
  std::optional<nbs::IpAddress> ip;
  if (colon != std::string::npos) {
    auto port_text = std::string_view(listen).substr(colon + 1);
    auto [p, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port_arg);
    if (ec == std::errc() && p == port_text.data() + port_text.size() &&
        !port_text.empty())
      ip = nbs::IpAddress::try_parse(listen.substr(0, colon));
  }
  if (!ip) throw InvalidArgument("--listen needs ip:port, got " + listen);

  nbs::ProxyConfig cfg;
  cfg.listen_host = ip->to_string();
  cfg.listen_port = port_arg;
  cfg.mode = *nbs::parse_mode(mode_name);
  cfg.origin_class = *nbs::parse_address_class(origin_class);
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::app);
    if (!log) throw SystemError("cannot open " + log_path);
    cfg.log = &log;
  }

  // Worker threads inherit the mask, so only sigwait below sees the signals.
  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGINT);
  sigaddset(&sigs, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

  nbs::ForwardProxy proxy(cfg);
  auto port = proxy.start();
  bool v6 = ip->family() == nbs::IpAddress::Family::kV6;
  env.out << "listening on " << (v6 ? "[" : "") << cfg.listen_host
          << (v6 ? "]" : "") << ':' << port << std::endl;
  int sig = 0;
  sigwait(&sigs, &sig);
  proxy.stop();
  pthread_sigmask(SIG_UNBLOCK, &sigs, nullptr);
}

// ---- option plumbing ------------------------------------------------------

const CLI::Validator kSessionHex(
    [](std::string& s) -> std::string {
      if (s.size() != 64 || !from_hex(s))
        return "expected 64 hex characters";
      return {};
    },
    "HEX64");

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Fingerprinting and network-boundary defenses, outside the "
               "browser.",
               "fpshield");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag(
      "--version",
      std::string("fpshield ") + kVersion + " (fpd config schema " +
          std::to_string(kFpdSchemaVersion) + ", profile schema " +
          std::to_string(kProfileSchemaVersion) + ")");

  Env env{in, out, err, {}};
  app.add_option("--session", env.globals.session_hex,
                 "Session key; a fresh one is drawn and echoed if omitted")
      ->check(kSessionHex);
  app.add_option("--origin", env.globals.origin,
                 "Origin the output is keyed to, e.g. https://a.example");
  app.add_option("--profile", env.globals.profile, "Protection profile")
      ->check(CLI::IsMember({"p1", "p2", "p3"}))
      ->capture_default_str();

  std::function<int()> action;

  // farble
  auto* farble_cmd = app.add_subcommand("farble", "Apply little lies to a "
                                        "bitmap or audio buffer");
  farble_cmd->require_subcommand(1);
  std::string in_path, out_path;
  for (std::string kind : {"canvas", "audio"}) {
    auto* sub = farble_cmd->add_subcommand(
        kind, kind == "canvas" ? "Farble a raw RGBA bitmap file"
                               : "Farble a raw float32 audio file");
    sub->add_option("--in", in_path, "Input file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output file (stdout if omitted)");
    sub->callback([&, kind] {
      action = [&, kind] {
        if (kind == "canvas")
          farble_canvas(env, in_path, out_path);
        else
          farble_audio(env, in_path, out_path);
        return kExitOk;
      };
    });
  }

  // spoof
  auto* spoof_cmd = app.add_subcommand("spoof", "Spoof identifying values");
  spoof_cmd->require_subcommand(1);
  spoof_cmd->add_subcommand("webgl", "WebGL vendor and renderer strings")
      ->callback([&] { action = [&] { spoof_webgl(env); return kExitOk; }; });
  std::size_t device_count = 3;
  auto* devices_cmd =
      spoof_cmd->add_subcommand("devices", "Media device identifiers");
  devices_cmd->add_option("--count", device_count, "Number of identifiers")
      ->check(CLI::Range(0, 1024))
      ->capture_default_str();
  devices_cmd->callback([&] {
    action = [&] { spoof_devices(env, device_count); return kExitOk; };
  });
  farble::GeoCoordinate coord;
  double precision_m = 1000;
  auto* geo_cmd = spoof_cmd->add_subcommand("geo", "Coarsen a position");
  geo_cmd->add_option("--lat", coord.latitude, "Latitude, degrees")
      ->required();
  geo_cmd->add_option("--lon", coord.longitude, "Longitude, degrees")
      ->required();
  geo_cmd->add_option("--accuracy", coord.accuracy, "Accuracy, meters");
  geo_cmd->add_option("--precision", precision_m, "Cell size, meters")
      ->capture_default_str();
  geo_cmd->callback([&] {
    action = [&] { spoof_geo(env, coord, precision_m); return kExitOk; };
  });

  // sensors
  auto* sensors_cmd = app.add_subcommand("sensors", "Stationary-device sensors");
  sensors_cmd->require_subcommand(1);
  std::string sensor_kind, sensor_format = "csv";
  double rate_hz = 10, duration_s = 10;
  std::vector<std::string> kind_names;
  for (auto k : sensors::kAllSensorKinds)
    kind_names.emplace_back(sensors::to_string(k));
  auto* gen_cmd = sensors_cmd->add_subcommand("gen", "Generate a trace");
  gen_cmd->add_option("--sensor", sensor_kind, "Sensor kind")
      ->required()
      ->check(CLI::IsMember(kind_names));
  gen_cmd->add_option("--rate", rate_hz, "Samples per second")
      ->capture_default_str();
  gen_cmd->add_option("--duration", duration_s, "Seconds")
      ->capture_default_str();
  gen_cmd->add_option("--format", sensor_format, "csv|jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  gen_cmd->callback([&] {
    action = [&] {
      sensors_gen(env, sensor_kind, rate_hz, duration_s, sensor_format);
      return kExitOk;
    };
  });

  // time
  auto* time_cmd = app.add_subcommand("time", "Timestamp shielding");
  time_cmd->require_subcommand(1);
  double quantum_ms = 10;
  bool no_randomize = false;
  auto* shield_cmd = time_cmd->add_subcommand(
      "shield", "Shield newline-separated timestamps (ms) read from stdin");
  shield_cmd->add_option("--quantum", quantum_ms, "Quantum, ms")
      ->capture_default_str();
  shield_cmd->add_flag("--no-randomize", no_randomize,
                       "Round down only, no keyed jitter");
  shield_cmd->callback([&] {
    action = [&] {
      time_shield(env, quantum_ms, !no_randomize);
      return kExitOk;
    };
  });

  // fpd
  auto* fpd_cmd = app.add_subcommand("fpd", "Fingerprint detector");
  fpd_cmd->require_subcommand(1);
  std::string trace_path, config_path, report_path, fpd_mode = "passive";
  bool fpd_json = false;
  auto* analyze_cmd = fpd_cmd->add_subcommand("analyze", "Evaluate a trace");
  analyze_cmd->add_option("--trace", trace_path, "Trace JSON")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--config", config_path,
                          "Group tree JSON (built-in tree if omitted)")
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--mode", fpd_mode, "passive|notify|block")
      ->check(CLI::IsMember({"passive", "notify", "block"}))
      ->capture_default_str();
  analyze_cmd->add_option("--report", report_path, "Write the JSON report here");
  analyze_cmd->add_flag("--json", fpd_json,
                        "Print the JSON report instead of text");
  analyze_cmd->callback([&] {
    action = [&] {
      return fpd_analyze(env, trace_path, config_path, fpd_mode, report_path,
                         fpd_json);
    };
  });
  fpd_cmd->add_subcommand("config", "Print the built-in group tree")
      ->callback([&] {
        action = [&] {
          out << fpd::FpdConfig::shipped_document() << '\n';
          return kExitOk;
        };
      });

  // profiles
  auto* profiles_cmd = app.add_subcommand("profiles", "Print the profile table");
  profiles_cmd->callback([&] {
    action = [&] {
      out << profile::ProfileTable::shipped_document() << '\n';
      return kExitOk;
    };
  });

  // nbs
  auto* nbs_cmd = app.add_subcommand("nbs", "Network boundary shield");
  nbs_cmd->require_subcommand(1);
  const std::vector<std::string> classes = {
      "public", "private", "unique_local", "link_local", "loopback",
      "unspecified"};
  std::string origin_class = "public", nbs_mode = "preresolve";
  std::string target_text, resolved, listen = "127.0.0.1:0", log_path;
  auto* check_cmd = nbs_cmd->add_subcommand("check", "Decide one request");
  check_cmd->add_option("--origin-class", origin_class, "Class of the page")
      ->check(CLI::IsMember(classes))
      ->capture_default_str();
  check_cmd->add_option("--target", target_text, "host[:port]")->required();
  check_cmd->add_option("--resolved", resolved, "Address the host resolved to");
  check_cmd->add_option("--mode", nbs_mode, "preresolve|learn")
      ->check(CLI::IsMember({"preresolve", "learn"}))
      ->capture_default_str();
  check_cmd->callback([&] {
    action = [&] {
      nbs_check(env, origin_class, target_text, resolved, nbs_mode);
      return kExitOk;
    };
  });
  auto* proxy_cmd = nbs_cmd->add_subcommand("proxy", "Run the filtering proxy");
  proxy_cmd->add_option("--listen", listen, "ip:port (port 0 picks one)")
      ->capture_default_str();
  proxy_cmd->add_option("--mode", nbs_mode, "preresolve|learn")
      ->check(CLI::IsMember({"preresolve", "learn"}))
      ->capture_default_str();
  proxy_cmd->add_option("--origin-class", origin_class, "Class of the pages")
      ->check(CLI::IsMember(classes))
      ->capture_default_str();
  proxy_cmd->add_option("--log", log_path, "Append JSONL decisions here");
  proxy_cmd->callback([&] {
    action = [&] {
      nbs_proxy(env, listen, nbs_mode, origin_class, log_path);
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
}

}  // namespace fpshield::cli
