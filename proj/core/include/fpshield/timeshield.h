#ifndef FPSHIELD_TIMESHIELD_H_
#define FPSHIELD_TIMESHIELD_H_

#include <chrono>
#include <cstdint>

#include "fpshield/keyrand.h"

// Timestamp shielding: round down to a quantum and, by default, add keyed
// noise that is constant within each quantum bucket. Outputs stay monotone
// and within one quantum of the input.
namespace fpshield::timeshield {

struct ShieldConfig {
  double quantum_ms = 10.0;
  bool randomize = true;
};

// Throws InvalidArgument unless quantum_ms is finite and > 0.
void validate(const ShieldConfig& cfg);

// Largest b with b * quantum <= t_ms.
uint64_t bucket_index(double t_ms, double quantum_ms);

// Throws InvalidArgument for negative or non-finite t_ms.
double shield_timestamp(const keyrand::FarbleSeed& seed, double t_ms,
                        const ShieldConfig& cfg);

// Monotonic clock readings are integral nanoseconds so that subtracting the
// context epoch is exact regardless of how long ago the device booted.
using MonotonicTime = std::chrono::nanoseconds;

struct ContextEpoch {
  MonotonicTime epoch{0};
};

double to_ms(MonotonicTime t);
MonotonicTime from_ms(double ms);

// Binds a seed and config so every timestamp source of one context shares
// the same lie.
class TimeShield {
 public:
  TimeShield(keyrand::FarbleSeed seed, ShieldConfig cfg);

  double shield(double t_ms) const {
    return shield_timestamp(seed_, t_ms, cfg_);
  }

  // Context-relative time, shielded. The raw clock's origin (device boot)
  // cancels out. Throws InvalidArgument if raw precedes the epoch.
  double sensor_timestamp(const ContextEpoch& epoch, MonotonicTime raw) const;

  const keyrand::FarbleSeed& seed() const { return seed_; }
  const ShieldConfig& config() const { return cfg_; }

 private:
  keyrand::FarbleSeed seed_;
  ShieldConfig cfg_;
};

}  // namespace fpshield::timeshield

#endif  // FPSHIELD_TIMESHIELD_H_
