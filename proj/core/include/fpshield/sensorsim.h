#ifndef FPSHIELD_SENSORSIM_H_
#define FPSHIELD_SENSORSIM_H_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "fpshield/keyrand.h"
#include "fpshield/timeshield.h"
#include "fpshield/vecmath.h"

// Fake readings for a stationary device. All state derives from one seed, so
// two tabs of the same origin that build their own DeviceState read the same
// values.
namespace fpshield::sensors {

enum class SensorKind {
  kMagnetometer,
  kAccelerometer,
  kLinearAcceleration,
  kGravity,
  kGyroscope,
  kAbsoluteOrientation,
  kRelativeOrientation,
  kAmbientLight,
};

inline constexpr std::array<SensorKind, 8> kAllSensorKinds = {
    SensorKind::kMagnetometer,        SensorKind::kAccelerometer,
    SensorKind::kLinearAcceleration,  SensorKind::kGravity,
    SensorKind::kGyroscope,           SensorKind::kAbsoluteOrientation,
    SensorKind::kRelativeOrientation, SensorKind::kAmbientLight,
};

std::string_view to_string(SensorKind kind);
// Accepts the to_string names ("magnetometer", "orientation_abs", ...).
std::optional<SensorKind> parse_sensor_kind(std::string_view text);

// Generator constants. None of these come from measurements we can cite;
// they were picked so traces look like a phone lying on a desk.
struct SensorConstants {
  int sines_min = 20;
  int sines_max = 30;
  double sine_amplitude_min_ut = 0.05;
  double sine_amplitude_max_ut = 0.5;
  double sine_period_min_s = 2.0;
  double sine_period_max_s = 600.0;
  double field_min_ut = 25.0;
  double field_max_ut = 65.0;
  double gravity_ms2 = 9.80665;
  // Per-component half-widths of the uniform noise.
  double gravity_noise_ms2 = 0.01 / 1.7320508075688772;
  double linear_noise_ms2 = 0.02;
  double gyro_noise_rads = 0.004;
  double orientation_noise_deg = 0.1;
  double lux_min = 100.0;
  double lux_max = 500.0;
  double lux_step = 50.0;
};

inline constexpr SensorConstants kSensorConstants{};

struct SineTerm {
  double amplitude = 0;  // uT
  double period_s = 0;
  double phase = 0;  // [0, 2pi)

  friend bool operator==(const SineTerm&, const SineTerm&) = default;
};

struct SineBank {
  std::vector<SineTerm> terms;

  double evaluate(double t_s) const;

  friend bool operator==(const SineBank&, const SineBank&) = default;
};

struct DeviceState {
  keyrand::FarbleSeed seed;
  Quaternion orientation;  // device frame -> world frame
  double relative_yaw = 0;  // reference offset of the relative orientation
  Vec3 mag_baseline;  // uT, device frame
  std::array<SineBank, 3> mag_banks;
  double illuminance_lux = 0;
  timeshield::TimeShield clock;
  timeshield::ContextEpoch context_epoch;
};

// Deterministic in (seed, clock, epoch).
DeviceState init_device_state(const keyrand::FarbleSeed& seed,
                              const timeshield::TimeShield& clock,
                              timeshield::ContextEpoch epoch = {});

struct SensorReading {
  SensorKind kind = SensorKind::kMagnetometer;
  // x, y, z for vector sensors; x, y, z, w for orientation; lux in [0].
  std::array<double, 4> value{};
  int dims = 3;
  double timestamp_ms = 0;

  Vec3 vec() const { return {value[0], value[1], value[2]}; }
  Quaternion quat() const { return {value[3], value[0], value[1], value[2]}; }

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

// |t_ms| is context-relative. Throws InvalidArgument for t_ms < 0.
SensorReading sample(const DeviceState& state, SensorKind kind, double t_ms);

// Same, starting from a raw monotonic clock reading.
SensorReading sample_at(const DeviceState& state, SensorKind kind,
                        timeshield::MonotonicTime raw);

}  // namespace fpshield::sensors

#endif  // FPSHIELD_SENSORSIM_H_
