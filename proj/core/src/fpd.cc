#include "fpshield/fpd.h"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "fpshield/error.h"
#include "json.hpp"

namespace fpshield::fpd {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok)
      throw ConfigError(where.empty() ? key : where + "." + key,
                        "unknown field");
  }
}

std::string field(const std::string& where, std::string_view name) {
  return where.empty() ? std::string(name) : where + "." + std::string(name);
}

std::string required_string(const json& obj, std::string_view name,
                            const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty())
    throw ConfigError(field(where, name), "expected a non-empty string");
  return it->get<std::string>();
}

double number(const json& obj, std::string_view name, const std::string& where,
              std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, name), "missing number");
  }
  if (!it->is_number()) throw ConfigError(field(where, name), "expected a number");
  double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError(field(where, name), "not finite");
  return v;
}

Severity severity_for(double score, double threshold, bool detected,
                      const SeverityBands& bands) {
  if (detected) return Severity::kRed;
  if (score >= bands.orange * threshold) return Severity::kOrange;
  if (score >= bands.yellow * threshold) return Severity::kYellow;
  return Severity::kGreen;
}

std::optional<Severity> parse_severity(std::string_view s) {
  for (auto v : {Severity::kGreen, Severity::kYellow, Severity::kOrange,
                 Severity::kRed})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

json counts_to_json(const std::vector<EndpointCount>& v) {
  json arr = json::array();
  for (const auto& e : v)
    arr.push_back({{"endpoint", e.endpoint}, {"count", e.count}});
  return arr;
}

std::vector<EndpointCount> counts_from_json(const json& arr,
                                            const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where, "expected an array");
  std::vector<EndpointCount> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    check_keys(arr[i], {"endpoint", "count"}, w);
    out.push_back({required_string(arr[i], "endpoint", w),
                   arr[i].value("count", uint64_t{0})});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

FpdConfig FpdConfig::parse(std::string_view json_document) {
  json doc = parse_json(json_document);
  check_keys(doc, {"schema", "root", "severity", "groups"}, "");
  if (!doc.contains("schema") || doc["schema"] != 1)
    throw ConfigError("schema", "unsupported schema version");

  FpdConfig cfg;
  cfg.root_ = required_string(doc, "root", "");

  if (doc.contains("severity")) {
    check_keys(doc["severity"], {"yellow", "orange"}, "severity");
    cfg.severity_.yellow = number(doc["severity"], "yellow", "severity", 0.25);
    cfg.severity_.orange = number(doc["severity"], "orange", "severity", 0.5);
    if (!(0 < cfg.severity_.yellow && cfg.severity_.yellow < cfg.severity_.orange &&
          cfg.severity_.orange < 1))
      throw ConfigError("severity", "need 0 < yellow < orange < 1");
  }

  if (!doc.contains("groups") || !doc["groups"].is_array() || doc["groups"].empty())
    throw ConfigError("groups", "expected a non-empty array");
  const json& groups = doc["groups"];
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    std::string where = "groups[" + std::to_string(gi) + "]";
    const json& g = groups[gi];
    check_keys(g, {"name", "description", "threshold", "groups", "endpoints"},
               where);
    Group group;
    group.name = required_string(g, "name", where);
    group.description = g.value("description", std::string());
    group.threshold = number(g, "threshold", where, 0.0);
    if (group.threshold < 0)
      throw ConfigError(where + ".threshold", "threshold must be >= 0");
    if (cfg.index_.contains(group.name))
      throw ConfigError(where + ".name", "duplicate group " + group.name);

    if (g.contains("endpoints")) {
      if (!g["endpoints"].is_array())
        throw ConfigError(where + ".endpoints", "expected an array");
      for (std::size_t li = 0; li < g["endpoints"].size(); ++li) {
        std::string lw = where + ".endpoints[" + std::to_string(li) + "]";
        const json& l = g["endpoints"][li];
        check_keys(l, {"endpoint", "min_calls", "weight"}, lw);
        Leaf leaf;
        leaf.endpoint = required_string(l, "endpoint", lw);
        double min_calls = number(l, "min_calls", lw, 1.0);
        if (min_calls < 1 || min_calls != std::floor(min_calls) ||
            min_calls > 4294967295.0)
          throw ConfigError(lw + ".min_calls", "must be an integer >= 1");
        leaf.min_calls = static_cast<uint32_t>(min_calls);
        leaf.weight = number(l, "weight", lw);
        if (!(leaf.weight > 0))
          throw ConfigError(lw + ".weight", "weight must be > 0");
        group.endpoints.push_back(std::move(leaf));
      }
    }
    if (g.contains("groups")) {
      if (!g["groups"].is_array())
        throw ConfigError(where + ".groups", "expected an array");
      for (std::size_t ci = 0; ci < g["groups"].size(); ++ci) {
        std::string cw = where + ".groups[" + std::to_string(ci) + "]";
        const json& c = g["groups"][ci];
        check_keys(c, {"group", "weight"}, cw);
        GroupRef ref;
        ref.group = required_string(c, "group", cw);
        ref.weight = number(c, "weight", cw);
        if (!(ref.weight > 0))
          throw ConfigError(cw + ".weight", "weight must be > 0");
        group.groups.push_back(std::move(ref));
      }
    }
    cfg.index_.emplace(group.name, cfg.groups_.size());
    cfg.groups_.push_back(std::move(group));
  }

  if (!cfg.index_.contains(cfg.root_))
    throw ConfigError("root", "no group named " + cfg.root_);
  for (std::size_t gi = 0; gi < cfg.groups_.size(); ++gi)
    for (std::size_t ci = 0; ci < cfg.groups_[gi].groups.size(); ++ci)
      if (!cfg.index_.contains(cfg.groups_[gi].groups[ci].group))
        throw ConfigError("groups[" + std::to_string(gi) + "].groups[" +
                              std::to_string(ci) + "].group",
                          "no group named " + cfg.groups_[gi].groups[ci].group);

  // Cycle and reachability check: DFS from the root with colouring.
  enum class Mark { kNone, kActive, kDone };
  std::vector<Mark> mark(cfg.groups_.size(), Mark::kNone);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    mark[i] = Mark::kActive;
    for (std::size_t ci = 0; ci < cfg.groups_[i].groups.size(); ++ci) {
      std::size_t child = cfg.index_.at(cfg.groups_[i].groups[ci].group);
      if (mark[child] == Mark::kActive)
        throw ConfigError("groups[" + std::to_string(i) + "].groups[" +
                              std::to_string(ci) + "]",
                          "cycle through group " + cfg.groups_[child].name);
      if (mark[child] == Mark::kNone) visit(child);
    }
    mark[i] = Mark::kDone;
  };
  visit(cfg.index_.at(cfg.root_));
  for (std::size_t i = 0; i < cfg.groups_.size(); ++i) {
    if (mark[i] == Mark::kNone) {
      // Unreachable groups may still hide a cycle; report that first.
      visit(i);
      throw ConfigError("groups[" + std::to_string(i) + "]",
                        "group " + cfg.groups_[i].name +
                            " is not reachable from the root");
    }
  }
  return cfg;
}

const FpdConfig& FpdConfig::shipped() {
  static const FpdConfig cfg = parse(shipped_document());
  return cfg;
}

const Group& FpdConfig::group(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw InvalidArgument("no group named " + std::string(name));
  return groups_[it->second];
}

bool FpdConfig::knows_endpoint(std::string_view endpoint) const {
  for (const auto& g : groups_)
    for (const auto& l : g.endpoints)
      if (l.endpoint == endpoint) return true;
  return false;
}

std::vector<std::string> FpdConfig::subtree_endpoints(
    std::string_view name) const {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  std::set<std::string, std::less<>> visited;
  std::function<void(const Group&)> walk = [&](const Group& g) {
    if (!visited.insert(g.name).second) return;
    for (const auto& l : g.endpoints)
      if (seen.insert(l.endpoint).second) out.push_back(l.endpoint);
    for (const auto& c : g.groups) walk(group(c.group));
  };
  walk(group(name));
  return out;
}

// ---------------------------------------------------------------------------
// State and traces

void FpdState::ingest(const ApiCallEvent& event) {
  if (event.endpoint.empty())
    throw InvalidArgument("API call event without an endpoint");
  if (event.count == 0)
    throw InvalidArgument("API call event with count 0");
  auto it = counters_.find(event.endpoint);
  if (it == counters_.end()) {
    counters_.emplace(event.endpoint, event.count);
  } else {
    it->second += event.count;
  }
}

uint64_t FpdState::count(std::string_view endpoint) const {
  auto it = counters_.find(endpoint);
  return it == counters_.end() ? 0 : it->second;
}

Trace parse_trace(std::string_view json_document) {
  json doc = parse_json(json_document);
  check_keys(doc, {"page", "events"}, "");
  Trace trace;
  trace.page = doc.value("page", std::string());
  if (!doc.contains("events") || !doc["events"].is_array())
    throw ConfigError("events", "expected an array");
  for (std::size_t i = 0; i < doc["events"].size(); ++i) {
    std::string where = "events[" + std::to_string(i) + "]";
    const json& e = doc["events"][i];
    check_keys(e, {"t_ms", "endpoint", "count"}, where);
    ApiCallEvent ev;
    ev.t_ms = number(e, "t_ms", where, 0.0);
    ev.endpoint = required_string(e, "endpoint", where);
    double count = number(e, "count", where, 1.0);
    if (count < 1 || count != std::floor(count) || count > 0x1.0p53)
      throw ConfigError(where + ".count", "must be an integer >= 1");
    ev.count = static_cast<uint64_t>(count);
    trace.events.push_back(std::move(ev));
  }
  return trace;
}

FpdState replay(const Trace& trace) {
  FpdState state(trace.page);
  for (const auto& e : trace.events) state.ingest(e);
  return state;
}

// ---------------------------------------------------------------------------
// Evaluation

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kGreen: return "green";
    case Severity::kYellow: return "yellow";
    case Severity::kOrange: return "orange";
    case Severity::kRed: return "red";
  }
  return "?";
}

FpdVerdict evaluate(const FpdState& state, const FpdConfig& cfg) {
  // Raw sums, memoized; the config is a DAG so each group is summed once.
  std::map<std::string, double, std::less<>> sums;
  std::function<double(const Group&)> sum_of = [&](const Group& g) -> double {
    if (auto it = sums.find(g.name); it != sums.end()) return it->second;
    double sum = 0;
    for (const auto& l : g.endpoints)
      if (state.count(l.endpoint) >= l.min_calls) sum += l.weight;
    for (const auto& c : g.groups) {
      const Group& child = cfg.group(c.group);
      double child_sum = sum_of(child);
      if (child_sum > 0 && child_sum >= child.threshold) sum += c.weight;
    }
    sums.emplace(g.name, sum);
    return sum;
  };

  FpdVerdict v;
  const Group& root = cfg.root_group();
  v.score = sum_of(root);
  v.threshold = root.threshold;
  v.detected = v.score > 0 && v.score >= v.threshold;
  v.severity = severity_for(v.score, v.threshold, v.detected, cfg.severity());
  for (const auto& g : cfg.groups()) {
    double s = sum_of(g);
    bool fired = s > 0 && s >= g.threshold;
    if (g.name == root.name) {
      v.group_values[g.name] = s;
    } else {
      v.group_values[g.name] = fired ? s : 0;
      if (fired) v.fired_groups.push_back(g.name);
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Report

Report render_report(const FpdState& state, const FpdConfig& cfg,
                     const FpdVerdict& verdict) {
  Report r;
  r.page = state.page();
  r.score = verdict.score;
  r.threshold = verdict.threshold;
  r.detected = verdict.detected;
  r.severity = verdict.severity;
  for (const auto& name : verdict.fired_groups) {
    const Group& g = cfg.group(name);
    GroupFinding f;
    f.name = g.name;
    f.description = g.description;
    f.value = verdict.group_values.at(g.name);
    for (const auto& ep : cfg.subtree_endpoints(g.name))
      if (auto n = state.count(ep); n > 0) f.endpoints.push_back({ep, n});
    r.groups.push_back(std::move(f));
  }
  for (const auto& [ep, n] : state.counters())
    if (!cfg.knows_endpoint(ep)) r.unclassified.push_back({ep, n});

  if (verdict.detected) {
    r.summary = "fingerprinting detected";
  } else if (verdict.score == 0 && r.groups.empty()) {
    r.summary = std::string(kNoActivitySummary);
  } else {
    r.summary = "fingerprinting-related activity below the detection threshold";
  }
  return r;
}

std::string Report::to_json() const {
  json doc;
  doc["page"] = page;
  doc["score"] = score;
  doc["threshold"] = threshold;
  doc["detected"] = detected;
  doc["severity"] = std::string(to_string(severity));
  doc["groups"] = json::array();
  for (const auto& g : groups) {
    doc["groups"].push_back({{"name", g.name},
                             {"description", g.description},
                             {"value", g.value},
                             {"endpoints", counts_to_json(g.endpoints)}});
  }
  doc["unclassified"] = counts_to_json(unclassified);
  doc["summary"] = summary;
  return doc.dump(2);
}

Report Report::from_json(std::string_view json_document) {
  json doc = parse_json(json_document);
  check_keys(doc, {"page", "score", "threshold", "detected", "severity",
                   "groups", "unclassified", "summary"},
             "");
  Report r;
  r.page = doc.value("page", std::string());
  r.score = number(doc, "score", "");
  r.threshold = number(doc, "threshold", "");
  r.detected = doc.value("detected", false);
  auto sev = parse_severity(doc.value("severity", std::string()));
  if (!sev) throw ConfigError("severity", "unknown severity");
  r.severity = *sev;
  const json& groups = doc.at("groups");
  if (!groups.is_array()) throw ConfigError("groups", "expected an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::string w = "groups[" + std::to_string(i) + "]";
    check_keys(groups[i], {"name", "description", "value", "endpoints"}, w);
    GroupFinding f;
    f.name = required_string(groups[i], "name", w);
    f.description = groups[i].value("description", std::string());
    f.value = number(groups[i], "value", w);
    f.endpoints = counts_from_json(groups[i].at("endpoints"), w + ".endpoints");
    r.groups.push_back(std::move(f));
  }
  r.unclassified = counts_from_json(doc.at("unclassified"), "unclassified");
  r.summary = doc.value("summary", std::string());
  return r;
}

std::string Report::to_text() const {
  std::ostringstream out;
  out << "Fingerprinting report for " << (page.empty() ? "(unnamed page)" : page)
      << "\n";
  out << "Verdict: " << (detected ? "DETECTED" : "not detected")
      << " (severity " << to_string(severity) << ", score " << score << " of "
      << threshold << ")\n";
  for (const auto& g : groups) {
    out << "\n[" << g.name << "] "
        << (g.description.empty() ? g.name : g.description) << " (value "
        << g.value << ")\n";
    for (const auto& e : g.endpoints)
      out << "  " << e.endpoint << "  x" << e.count << "\n";
  }
  if (!unclassified.empty()) {
    out << "\nOther observed endpoints (not scored):\n";
    for (const auto& e : unclassified)
      out << "  " << e.endpoint << "  x" << e.count << "\n";
  }
  out << "\n" << summary << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Directives

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "passive") return Mode::kPassive;
  if (text == "notify") return Mode::kNotify;
  if (text == "block") return Mode::kBlock;
  return std::nullopt;
}

std::string_view to_string(BlockDirective d) {
  switch (d) {
    case BlockDirective::kBlockSubsequentAsyncRequests:
      return "BlockSubsequentAsyncRequests";
    case BlockDirective::kClearPageStorage:
      return "ClearPageStorage";
  }
  return "?";
}

std::vector<BlockDirective> block_directives(const FpdVerdict& verdict,
                                             Mode mode) {
  if (mode != Mode::kBlock || !verdict.detected) return {};
  return {BlockDirective::kBlockSubsequentAsyncRequests,
          BlockDirective::kClearPageStorage};
}

}  // namespace fpshield::fpd
