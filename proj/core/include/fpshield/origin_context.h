#ifndef FPSHIELD_ORIGIN_CONTEXT_H_
#define FPSHIELD_ORIGIN_CONTEXT_H_

#include <string_view>

#include "fpshield/keyrand.h"
#include "fpshield/origin.h"
#include "fpshield/sensorsim.h"
#include "fpshield/timeshield.h"

namespace fpshield {

// Everything one origin sees within one session. All timestamp sources of
// the origin share time_shield(), so event, sensor and performance clocks
// tell the same lie.
class OriginContext {
 public:
  OriginContext(keyrand::SessionKey session, Origin origin,
                timeshield::ShieldConfig time_cfg = {});

  keyrand::FarbleSeed seed(std::string_view tag) const;
  const timeshield::TimeShield& time_shield() const { return time_shield_; }
  sensors::DeviceState device_state(timeshield::ContextEpoch epoch = {}) const;

  const Origin& origin() const { return origin_; }
  const keyrand::SessionKey& session() const { return session_; }

 private:
  keyrand::SessionKey session_;
  Origin origin_;
  timeshield::TimeShield time_shield_;
};

}  // namespace fpshield

#endif  // FPSHIELD_ORIGIN_CONTEXT_H_
