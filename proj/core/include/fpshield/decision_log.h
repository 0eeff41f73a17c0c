#ifndef FPSHIELD_DECISION_LOG_H_
#define FPSHIELD_DECISION_LOG_H_

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "fpshield/nbs.h"

namespace fpshield::nbs {

struct LogRecord {
  std::chrono::system_clock::time_point t;
  std::string host;
  std::string cls;  // class of the target, "unknown" before learning
  std::string decision;
  std::string reason;
  int coalesced = 1;

  // {"t": ISO-8601, "host", "class", "decision", "reason", "coalesced"}
  std::string to_json() const;
};

// JSONL decision log. Allow decisions are written immediately. Blocks of the
// same (origin class, host) inside one window are held back and written as a
// single line whose "coalesced" field counts them; a window closes when a
// later record arrives after it expired, on flush(), or on destruction.
class DecisionLog {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  static constexpr std::chrono::seconds kCoalesceWindow{10};

  explicit DecisionLog(std::ostream* out,
                       Clock clock = std::chrono::system_clock::now);
  ~DecisionLog();

  DecisionLog(const DecisionLog&) = delete;
  DecisionLog& operator=(const DecisionLog&) = delete;

  void record(AddressClass origin_class, const std::string& host,
              const BoundaryDecision& decision);
  // Writes out windows that have expired by now.
  void tick();
  // Writes out every pending window.
  void flush();

 private:
  struct Pending {
    LogRecord first;
    std::chrono::system_clock::time_point opened;
  };

  void write_locked(const LogRecord& rec);
  void expire_locked(std::chrono::system_clock::time_point now, bool all);

  std::mutex mu_;
  std::ostream* out_;
  Clock clock_;
  std::map<std::pair<AddressClass, std::string>, Pending> pending_;
};

}  // namespace fpshield::nbs

#endif  // FPSHIELD_DECISION_LOG_H_
