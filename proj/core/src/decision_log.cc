#include "fpshield/decision_log.h"

#include <ctime>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace fpshield::nbs {

namespace {

std::string iso8601(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  auto secs = time_point_cast<seconds>(t);
  if (secs > t) secs -= seconds(1);
  auto ms = duration_cast<milliseconds>(t - secs).count();
  std::time_t tt = system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3)
      << std::setfill('0') << ms << 'Z';
  return out.str();
}

}  // namespace

std::string LogRecord::to_json() const {
  nlohmann::ordered_json j;
  j["t"] = iso8601(t);
  j["host"] = host;
  j["class"] = cls;
  j["decision"] = decision;
  j["reason"] = reason;
  j["coalesced"] = coalesced;
  return j.dump();
}

DecisionLog::DecisionLog(std::ostream* out, Clock clock)
    : out_(out), clock_(std::move(clock)) {}

DecisionLog::~DecisionLog() { flush(); }

void DecisionLog::record(AddressClass origin_class, const std::string& host,
                         const BoundaryDecision& decision) {
  std::lock_guard lock(mu_);
  auto now = clock_();
  expire_locked(now, false);

  LogRecord rec;
  rec.t = now;
  rec.host = host;
  rec.cls = decision.target_class
                ? std::string(to_string(*decision.target_class))
                : "unknown";
  rec.decision = std::string(to_string(decision.kind));
  rec.reason = decision.reason;

  if (decision.kind != DecisionKind::kBlock) {
    write_locked(rec);
    return;
  }
  auto key = std::make_pair(origin_class, host);
  auto it = pending_.find(key);
  if (it != pending_.end()) {
    ++it->second.first.coalesced;
  } else {
    pending_.emplace(key, Pending{rec, now});
  }
}

void DecisionLog::tick() {
  std::lock_guard lock(mu_);
  expire_locked(clock_(), false);
}

void DecisionLog::flush() {
  std::lock_guard lock(mu_);
  expire_locked(clock_(), true);
  if (out_) out_->flush();
}

void DecisionLog::write_locked(const LogRecord& rec) {
  if (out_ == nullptr) return;
  *out_ << rec.to_json() << '\n';
  out_->flush();
}

void DecisionLog::expire_locked(std::chrono::system_clock::time_point now,
                                bool all) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (all || now - it->second.opened >= kCoalesceWindow) {
      write_locked(it->second.first);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace fpshield::nbs
