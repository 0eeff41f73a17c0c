#include "fpshield/sensorsim.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "fpshield/error.h"

namespace fpshield::sensors {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr const SensorConstants& K = kSensorConstants;

// Keyed noise for one (sensor, instant): a fresh seed per sample so that any
// t can be evaluated without replaying earlier samples.
keyrand::FarbleSeed noise_seed(const DeviceState& s, std::string_view label,
                               double t_ms) {
  Digest d = Sha256()
                 .update(s.seed.bytes())
                 .update_byte(0)
                 .update(label)
                 .update_byte(0)
                 .update_le64(std::bit_cast<uint64_t>(t_ms))
                 .finish();
  return keyrand::FarbleSeed(d, s.seed.tag());
}

Vec3 box_noise(const keyrand::FarbleSeed& seed, double half_width) {
  auto c = [&](uint64_t i) {
    return (2 * keyrand::uniform01(seed, i) - 1) * half_width;
  };
  return {c(0), c(1), c(2)};
}

Vec3 gravity_at(const DeviceState& s, double t_ms) {
  Vec3 world{0, 0, -K.gravity_ms2};
  Vec3 dev = s.orientation.conjugate().rotate(world);
  return dev + box_noise(noise_seed(s, "gravity", t_ms), K.gravity_noise_ms2);
}

Vec3 linear_at(const DeviceState& s, double t_ms) {
  return box_noise(noise_seed(s, "linear", t_ms), K.linear_noise_ms2);
}

// Small rotation about a keyed axis, angle below orientation_noise_deg.
Quaternion orientation_noise(const DeviceState& s, std::string_view label,
                             double t_ms) {
  auto seed = noise_seed(s, label, t_ms);
  double z = 2 * keyrand::uniform01(seed, 0) - 1;
  double phi = kTwoPi * keyrand::uniform01(seed, 1);
  double r = std::sqrt(1 - z * z);
  Vec3 axis{r * std::cos(phi), r * std::sin(phi), z};
  double angle = keyrand::uniform01(seed, 2) * K.orientation_noise_deg *
                 std::numbers::pi / 180.0;
  return Quaternion::from_axis_angle(axis, angle);
}

SensorReading vector_reading(SensorKind kind, const Vec3& v) {
  SensorReading r;
  r.kind = kind;
  r.value = {v.x, v.y, v.z, 0};
  r.dims = 3;
  return r;
}

SensorReading quat_reading(SensorKind kind, const Quaternion& q) {
  SensorReading r;
  r.kind = kind;
  r.value = {q.x, q.y, q.z, q.w};
  r.dims = 4;
  return r;
}

}  // namespace

std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::kMagnetometer: return "magnetometer";
    case SensorKind::kAccelerometer: return "accelerometer";
    case SensorKind::kLinearAcceleration: return "linear_acceleration";
    case SensorKind::kGravity: return "gravity";
    case SensorKind::kGyroscope: return "gyroscope";
    case SensorKind::kAbsoluteOrientation: return "orientation_abs";
    case SensorKind::kRelativeOrientation: return "orientation_rel";
    case SensorKind::kAmbientLight: return "ambient_light";
  }
  return "?";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view text) {
  for (auto k : kAllSensorKinds)
    if (to_string(k) == text) return k;
  return std::nullopt;
}

double SineBank::evaluate(double t_s) const {
  double sum = 0;
  for (const auto& term : terms)
    sum += term.amplitude * std::sin(kTwoPi * t_s / term.period_s + term.phase);
  return sum;
}

DeviceState init_device_state(const keyrand::FarbleSeed& seed,
                              const timeshield::TimeShield& clock,
                              timeshield::ContextEpoch epoch) {
  keyrand::UniformCursor draw(seed);

  // Uniform random rotation (Shoemake).
  double u1 = draw.next01(), u2 = draw.next01(), u3 = draw.next01();
  Quaternion q{std::sqrt(u1) * std::cos(kTwoPi * u3),
               std::sqrt(1 - u1) * std::sin(kTwoPi * u2),
               std::sqrt(1 - u1) * std::cos(kTwoPi * u2),
               std::sqrt(u1) * std::sin(kTwoPi * u3)};

  double z = 2 * draw.next01() - 1;
  double phi = kTwoPi * draw.next01();
  double magnitude = draw.next_in(K.field_min_ut, K.field_max_ut);
  double r = std::sqrt(1 - z * z);
  Vec3 baseline = Vec3{r * std::cos(phi), r * std::sin(phi), z} * magnitude;

  double relative_yaw = draw.next_in(0, kTwoPi);
  double steps = std::floor((K.lux_max - K.lux_min) / K.lux_step);
  double lux = K.lux_min + K.lux_step * static_cast<double>(
                                            draw.next_range(0, static_cast<int64_t>(steps)));

  std::array<SineBank, 3> banks;
  for (auto& bank : banks) {
    auto n = draw.next_range(K.sines_min, K.sines_max);
    bank.terms.reserve(static_cast<std::size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      SineTerm term;
      term.amplitude =
          draw.next_in(K.sine_amplitude_min_ut, K.sine_amplitude_max_ut);
      term.period_s = draw.next_in(K.sine_period_min_s, K.sine_period_max_s);
      term.phase = kTwoPi * draw.next01();
      bank.terms.push_back(term);
    }
  }

  return DeviceState{seed,  q.normalized(), relative_yaw, baseline,
                     banks, lux,            clock,        epoch};
}

SensorReading sample(const DeviceState& state, SensorKind kind, double t_ms) {
  if (!(t_ms >= 0) || !std::isfinite(t_ms))
    throw InvalidArgument("sensor sample time must be finite and >= 0");

  SensorReading r;
  switch (kind) {
    case SensorKind::kMagnetometer: {
      double t_s = t_ms / 1000.0;
      Vec3 v{state.mag_baseline.x + state.mag_banks[0].evaluate(t_s),
             state.mag_baseline.y + state.mag_banks[1].evaluate(t_s),
             state.mag_baseline.z + state.mag_banks[2].evaluate(t_s)};
      r = vector_reading(kind, v);
      break;
    }
    case SensorKind::kGravity:
      r = vector_reading(kind, gravity_at(state, t_ms));
      break;
    case SensorKind::kLinearAcceleration:
      r = vector_reading(kind, linear_at(state, t_ms));
      break;
    case SensorKind::kAccelerometer:
      r = vector_reading(kind, gravity_at(state, t_ms) + linear_at(state, t_ms));
      break;
    case SensorKind::kGyroscope:
      r = vector_reading(kind, box_noise(noise_seed(state, "gyro", t_ms),
                                         K.gyro_noise_rads));
      break;
    case SensorKind::kAbsoluteOrientation:
      r = quat_reading(kind, (state.orientation *
                              orientation_noise(state, "orientation", t_ms))
                                 .normalized());
      break;
    case SensorKind::kRelativeOrientation: {
      Quaternion yaw =
          Quaternion::from_axis_angle({0, 0, 1}, state.relative_yaw);
      r = quat_reading(kind, (yaw * state.orientation *
                              orientation_noise(state, "orientation", t_ms))
                                 .normalized());
      break;
    }
    case SensorKind::kAmbientLight:
      r.kind = kind;
      r.value = {state.illuminance_lux, 0, 0, 0};
      r.dims = 1;
      break;
    default:
      throw InvalidArgument("unknown sensor kind");
  }
  r.timestamp_ms = state.clock.shield(t_ms);
  return r;
}

SensorReading sample_at(const DeviceState& state, SensorKind kind,
                        timeshield::MonotonicTime raw) {
  // Validates raw >= epoch and yields the shielded context-relative time.
  (void)state.clock.sensor_timestamp(state.context_epoch, raw);
  return sample(state, kind, timeshield::to_ms(raw - state.context_epoch.epoch));
}

}  // namespace fpshield::sensors
