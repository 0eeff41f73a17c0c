#include "fpshield/timeshield.h"

#include <cmath>
#include <limits>
#include <string>

#include "fpshield/error.h"

namespace fpshield::timeshield {

void validate(const ShieldConfig& cfg) {
  if (!(cfg.quantum_ms > 0) || !std::isfinite(cfg.quantum_ms))
    throw InvalidArgument("time quantum must be a positive number of ms");
}

uint64_t bucket_index(double t_ms, double quantum_ms) {
  double b = std::floor(t_ms / quantum_ms);
  // t / q can round across an integer; settle on the bucket whose computed
  // lower edge really is <= t.
  if (b > 0 && b * quantum_ms > t_ms) b -= 1;
  if ((b + 1) * quantum_ms <= t_ms) b += 1;
  return static_cast<uint64_t>(b);
}

double shield_timestamp(const keyrand::FarbleSeed& seed, double t_ms,
                        const ShieldConfig& cfg) {
  validate(cfg);
  if (!(t_ms >= 0) || !std::isfinite(t_ms))
    throw InvalidArgument("timestamp must be finite and >= 0, got " +
                          std::to_string(t_ms));
  const double q = cfg.quantum_ms;
  // Beyond 2^53 buckets the bucket edges stop being exact doubles.
  if (t_ms / q >= 0x1.0p53)
    throw InvalidArgument("timestamp too large for the configured quantum");
  const uint64_t b = bucket_index(t_ms, q);
  const double lo = static_cast<double>(b) * q;
  if (!cfg.randomize) return lo;

  const double hi = static_cast<double>(b + 1) * q;
  double out = lo + keyrand::uniform01(seed, b) * q;
  if (out >= hi) out = std::nextafter(hi, 0.0);
  return out;
}

double to_ms(MonotonicTime t) {
  return static_cast<double>(t.count()) / 1e6;
}

MonotonicTime from_ms(double ms) {
  return MonotonicTime(static_cast<int64_t>(std::llround(ms * 1e6)));
}

TimeShield::TimeShield(keyrand::FarbleSeed seed, ShieldConfig cfg)
    : seed_(std::move(seed)), cfg_(cfg) {
  validate(cfg_);
}

double TimeShield::sensor_timestamp(const ContextEpoch& epoch,
                                    MonotonicTime raw) const {
  if (raw < epoch.epoch)
    throw InvalidArgument("monotonic reading precedes the context epoch");
  return shield(to_ms(raw - epoch.epoch));
}

}  // namespace fpshield::timeshield
