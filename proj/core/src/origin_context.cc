#include "fpshield/origin_context.h"

namespace fpshield {

OriginContext::OriginContext(keyrand::SessionKey session, Origin origin,
                             timeshield::ShieldConfig time_cfg)
    : session_(std::move(session)),
      origin_(std::move(origin)),
      time_shield_(keyrand::derive_seed(session_, origin_, keyrand::tags::kTime),
                   time_cfg) {}

keyrand::FarbleSeed OriginContext::seed(std::string_view tag) const {
  return keyrand::derive_seed(session_, origin_, tag);
}

sensors::DeviceState OriginContext::device_state(
    timeshield::ContextEpoch epoch) const {
  return sensors::init_device_state(seed(keyrand::tags::kSensors), time_shield_,
                                    epoch);
}

}  // namespace fpshield
