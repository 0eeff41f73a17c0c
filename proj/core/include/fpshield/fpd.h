#ifndef FPSHIELD_FPD_H_
#define FPSHIELD_FPD_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Fingerprint detector. Counts calls of fingerprinting-relevant endpoints and
// evaluates a weighted group tree over the counters. Because only counters
// are consulted, the verdict does not depend on the order of calls.
//
// Evaluation rules:
//   - an endpoint leaf fires when its counter >= min_calls;
//   - a group sums the weights of its fired children and fires when the sum
//     is > 0 and >= its threshold;
//   - the score is the root's sum; detection is score > 0 and
//     score >= root threshold.
namespace fpshield::fpd {

struct ApiCallEvent {
  double t_ms = 0;
  std::string endpoint;
  uint64_t count = 1;
};

struct Leaf {
  std::string endpoint;
  uint32_t min_calls = 1;
  double weight = 0;
};

struct GroupRef {
  std::string group;
  double weight = 0;
};

struct Group {
  std::string name;
  std::string description;
  double threshold = 0;
  std::vector<Leaf> endpoints;
  std::vector<GroupRef> groups;
};

struct SeverityBands {
  double yellow = 0.25;  // fractions of the root threshold
  double orange = 0.5;
};

class FpdConfig {
 public:
  // Throws ConfigError naming the offending location on a schema violation,
  // a non-positive weight, a negative threshold, a dangling or cyclic group
  // reference.
  static FpdConfig parse(std::string_view json_document);

  static const FpdConfig& shipped();
  static std::string_view shipped_document();

  const std::string& root() const { return root_; }
  const Group& root_group() const { return group(root_); }
  const Group& group(std::string_view name) const;
  // Groups in document order.
  const std::vector<Group>& groups() const { return groups_; }
  const SeverityBands& severity() const { return severity_; }

  bool knows_endpoint(std::string_view endpoint) const;
  // Endpoints in the subtree of |group|, each once, in first-seen order.
  std::vector<std::string> subtree_endpoints(std::string_view group) const;

 private:
  std::string root_;
  std::vector<Group> groups_;
  std::map<std::string, std::size_t, std::less<>> index_;
  SeverityBands severity_;
};

class FpdState {
 public:
  explicit FpdState(std::string page = {}) : page_(std::move(page)) {}

  // Throws InvalidArgument for an empty endpoint or count 0.
  void ingest(const ApiCallEvent& event);

  uint64_t count(std::string_view endpoint) const;
  const std::map<std::string, uint64_t, std::less<>>& counters() const {
    return counters_;
  }
  const std::string& page() const { return page_; }

  friend bool operator==(const FpdState&, const FpdState&) = default;

 private:
  std::string page_;
  std::map<std::string, uint64_t, std::less<>> counters_;
};

struct Trace {
  std::string page;
  std::vector<ApiCallEvent> events;
};

// {"page": "...", "events": [{"t_ms": n, "endpoint": "...", "count": n}]}.
// count defaults to 1. Throws ConfigError.
Trace parse_trace(std::string_view json_document);

FpdState replay(const Trace& trace);

enum class Severity { kGreen, kYellow, kOrange, kRed };
std::string_view to_string(Severity s);

struct FpdVerdict {
  double score = 0;
  double threshold = 0;
  bool detected = false;
  Severity severity = Severity::kGreen;
  // Non-root groups that fired, in config order.
  std::vector<std::string> fired_groups;
  // Value of every group (0 unless fired; the root holds the raw score).
  std::map<std::string, double> group_values;

  friend bool operator==(const FpdVerdict&, const FpdVerdict&) = default;
};

FpdVerdict evaluate(const FpdState& state, const FpdConfig& cfg);

struct EndpointCount {
  std::string endpoint;
  uint64_t count = 0;
  friend bool operator==(const EndpointCount&, const EndpointCount&) = default;
};

struct GroupFinding {
  std::string name;
  std::string description;
  double value = 0;
  std::vector<EndpointCount> endpoints;
  friend bool operator==(const GroupFinding&, const GroupFinding&) = default;
};

struct Report {
  std::string page;
  double score = 0;
  double threshold = 0;
  bool detected = false;
  Severity severity = Severity::kGreen;
  std::vector<GroupFinding> groups;
  std::vector<EndpointCount> unclassified;
  std::string summary;

  std::string to_json() const;
  static Report from_json(std::string_view json_document);
  std::string to_text() const;

  friend bool operator==(const Report&, const Report&) = default;
};

inline constexpr std::string_view kNoActivitySummary =
    "no fingerprinting activity";

Report render_report(const FpdState& state, const FpdConfig& cfg,
                     const FpdVerdict& verdict);

enum class Mode { kPassive, kNotify, kBlock };
std::optional<Mode> parse_mode(std::string_view text);

enum class BlockDirective { kBlockSubsequentAsyncRequests, kClearPageStorage };
std::string_view to_string(BlockDirective d);

// Directives only ever come out of block mode with a positive verdict. They
// stop further uploads; whatever the page already sent stays sent.
std::vector<BlockDirective> block_directives(const FpdVerdict& verdict,
                                             Mode mode);

}  // namespace fpshield::fpd

#endif  // FPSHIELD_FPD_H_
