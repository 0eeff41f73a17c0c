#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fpshield/error.h"
#include "fpshield/fpd.h"
#include "gen.h"
#include "json.hpp"

using namespace fpshield;
using namespace fpshield::fpd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Plain recursive evaluator straight from the rules, no memoization.
double oracle_sum(const FpdConfig& cfg, const FpdState& st, const std::string& g) {
  const Group& grp = cfg.group(g);
  double sum = 0;
  for (const auto& l : grp.endpoints)
    if (st.count(l.endpoint) >= l.min_calls) sum += l.weight;
  for (const auto& c : grp.groups) {
    double cs = oracle_sum(cfg, st, c.group);
    if (cs > 0 && cs >= cfg.group(c.group).threshold) sum += c.weight;
  }
  return sum;
}

const std::vector<std::string> kPool = {"a", "b", "c", "d", "e", "f",
                                        "g", "h", "i", "j", "k", "l"};

// Random DAG: group i only references groups j > i, and every group but the
// root is referenced by at least one earlier group.
std::string random_config(testgen::Gen& g) {
  int n = static_cast<int>(g.range(1, 6));
  nlohmann::json groups = nlohmann::json::array();
  std::vector<nlohmann::json> refs(n, nlohmann::json::array());
  for (int i = 1; i < n; ++i) {
    int parent = static_cast<int>(g.range(0, i - 1));
    refs[parent].push_back({{"group", "g" + std::to_string(i)},
                            {"weight", static_cast<double>(g.range(1, 4))}});
    for (int extra = 0; extra < i - 1; ++extra)
      if (g.range(0, 3) == 0 && extra != parent)
        refs[extra].push_back({{"group", "g" + std::to_string(i)},
                               {"weight", static_cast<double>(g.range(1, 4))}});
  }
  for (int i = 0; i < n; ++i) {
    nlohmann::json leaves = nlohmann::json::array();
    int nl = static_cast<int>(g.range(0, 4));
    for (int k = 0; k < nl; ++k)
      leaves.push_back({{"endpoint", kPool[g.range(0, 11)]},
                        {"min_calls", g.range(1, 3)},
                        {"weight", static_cast<double>(g.range(1, 3))}});
    groups.push_back({{"name", "g" + std::to_string(i)},
                      {"threshold", static_cast<double>(g.range(0, 5))},
                      {"endpoints", leaves},
                      {"groups", refs[i]}});
  }
  return nlohmann::json{{"schema", 1}, {"root", "g0"}, {"groups", groups}}.dump();
}

Trace random_trace(testgen::Gen& g) {
  Trace t;
  int n = static_cast<int>(g.range(0, 25));
  for (int i = 0; i < n; ++i)
    t.events.push_back({static_cast<double>(i), kPool[g.range(0, 11)],
                        static_cast<uint64_t>(g.range(1, 3))});
  return t;
}

void expect_config_error(const std::string& doc, const std::string& location) {
  try {
    FpdConfig::parse(doc);
    ADD_FAILURE() << "accepted " << doc;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.location(), location) << e.what();
  }
}

}  // namespace

TEST(Config, ShippedLoadsAndReparses) {
  const auto& cfg = FpdConfig::shipped();
  EXPECT_EQ(cfg.root(), "fingerprinting");
  EXPECT_EQ(cfg.root_group().threshold, 8);
  EXPECT_NO_THROW(FpdConfig::parse(FpdConfig::shipped_document()));
}

TEST(Config, Rejections) {
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","endpoints":[{"endpoint":"x","weight":-1}]}]})",
      "groups[0].endpoints[0].weight");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","groups":[{"group":"r","weight":1}]}]})",
      "groups[0].groups[0]");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","groups":[{"group":"s","weight":1}]},
          {"name":"s","groups":[{"group":"r","weight":1}]}]})",
      "groups[1].groups[0]");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","colour":"blue"}]})",
      "groups[0].colour");
  expect_config_error(R"({"schema":1,"root":"r","groups":[{"name":"r"}],"x":1})", "x");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","threshold":-1}]})",
      "groups[0].threshold");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","endpoints":[{"endpoint":"x","weight":1,"min_calls":0.5}]}]})",
      "groups[0].endpoints[0].min_calls");
  expect_config_error(
      R"({"schema":1,"root":"r","groups":[{"name":"r","groups":[{"group":"nope","weight":1}]}]})",
      "groups[0].groups[0].group");
  expect_config_error(R"({"schema":1,"root":"r","groups":[{"name":"r"},{"name":"s"}]})",
                      "groups[1]");
  expect_config_error(R"({"schema":2,"root":"r","groups":[{"name":"r"}]})", "schema");
  expect_config_error("{not json", "");
}

TEST(State, Counting) {
  FpdState st;
  st.ingest({0, "HTMLCanvasElement.prototype.toDataURL", 1});
  EXPECT_EQ(st.count("HTMLCanvasElement.prototype.toDataURL"), 1u);
  st.ingest({1, "x", 2});
  st.ingest({2, "x", 3});
  EXPECT_EQ(st.count("x"), 5u);
  EXPECT_THROW(st.ingest({3, "", 1}), InvalidArgument);
  EXPECT_THROW(st.ingest({3, "x", 0}), InvalidArgument);
}

TEST(State, PropertyOrderInvariant) {
  testgen::Gen g(60);
  for (int i = 0; i < 200; ++i) {
    auto t = random_trace(g);
    auto shuffled = t;
    g.shuffle(shuffled.events);
    EXPECT_EQ(replay(t), replay(shuffled));
  }
}

TEST(Trace, ParsesAndDefaultsCount) {
  auto t = parse_trace(R"({"page":"https://p.example/","events":[
      {"t_ms":1,"endpoint":"a"},{"t_ms":2,"endpoint":"b","count":4}]})");
  ASSERT_EQ(t.events.size(), 2u);
  EXPECT_EQ(t.events[0].count, 1u);
  EXPECT_EQ(t.events[1].count, 4u);
  EXPECT_THROW(parse_trace(R"({"events":[{"endpoint":"a","count":0}]})"), ConfigError);
  EXPECT_THROW(parse_trace(R"({"events":[{"endpoint":"a","when":3}]})"), ConfigError);
}

TEST(Evaluate, EmptyTraceIsGreen) {
  auto v = evaluate(FpdState{}, FpdConfig::shipped());
  EXPECT_EQ(v.score, 0);
  EXPECT_FALSE(v.detected);
  EXPECT_EQ(v.severity, Severity::kGreen);
}

TEST(Evaluate, SingleUserAgentNotDetected) {
  FpdState st;
  st.ingest({0, "navigator.userAgent", 1});
  auto v = evaluate(st, FpdConfig::shipped());
  EXPECT_FALSE(v.detected);
  EXPECT_TRUE(v.fired_groups.empty());
}

TEST(Evaluate, CanvasFingerprintTraceDetected) {
  // fillText + toDataURL + measureText x20 + font probes + getChannelData +
  // navigator enumeration. Hand evaluation: canvas 1+2=3 fires (4), fonts
  // 2+2=4 fires (4), audio 2 < 3, navigator 6 fires (2): score 10.
  FpdState st;
  st.ingest({0, "CanvasRenderingContext2D.prototype.fillText", 1});
  st.ingest({1, "HTMLCanvasElement.prototype.toDataURL", 1});
  st.ingest({2, "CanvasRenderingContext2D.prototype.measureText", 20});
  st.ingest({3, "FontFaceSet.prototype.check", 12});
  st.ingest({4, "AudioBuffer.prototype.getChannelData", 1});
  for (auto p : {"userAgent", "platform", "language", "languages",
                 "hardwareConcurrency", "deviceMemory"})
    st.ingest({5, std::string("navigator.") + p, 1});
  auto v = evaluate(st, FpdConfig::shipped());
  EXPECT_EQ(v.score, 10);
  EXPECT_TRUE(v.detected);
  EXPECT_EQ(v.severity, Severity::kRed);
  EXPECT_EQ(v.fired_groups, (std::vector<std::string>{"canvas", "fonts", "navigator"}));
}

TEST(Evaluate, SeverityBands) {
  FpdState st;
  st.ingest({0, "screen.width", 1});
  for (auto s : {"screen.height", "screen.availWidth", "screen.availHeight"})
    st.ingest({0, s, 1});
  st.ingest({0, "Date.prototype.getTimezoneOffset", 1});
  st.ingest({0, "Intl.DateTimeFormat.prototype.resolvedOptions", 1});
  EXPECT_EQ(evaluate(st, FpdConfig::shipped()).severity, Severity::kYellow);  // 2 of 8
  st.ingest({0, "HTMLCanvasElement.prototype.toDataURL", 1});
  st.ingest({0, "CanvasRenderingContext2D.prototype.fillText", 1});
  EXPECT_EQ(evaluate(st, FpdConfig::shipped()).severity, Severity::kOrange);  // 6 of 8
}

TEST(Evaluate, ZeroThresholdRootNeedsActivity) {
  auto cfg = FpdConfig::parse(
      R"({"schema":1,"root":"r","groups":[{"name":"r","threshold":0,
          "endpoints":[{"endpoint":"x","weight":1}]}]})");
  EXPECT_FALSE(evaluate(FpdState{}, cfg).detected);
  FpdState st;
  st.ingest({0, "x", 1});
  EXPECT_TRUE(evaluate(st, cfg).detected);
}

TEST(Evaluate, PropertyMatchesOracleMonotoneIdempotent) {
  testgen::Gen g(61);
  for (int i = 0; i < 300; ++i) {
    auto cfg = FpdConfig::parse(random_config(g));
    auto t = random_trace(g);
    auto st = replay(t);
    auto v = evaluate(st, cfg);
    ASSERT_EQ(v.score, oracle_sum(cfg, st, cfg.root()));
    ASSERT_EQ(v, evaluate(st, cfg));
    auto more = t;
    auto extra = random_trace(g);
    more.events.insert(more.events.end(), extra.events.begin(), extra.events.end());
    ASSERT_GE(evaluate(replay(more), cfg).score, v.score);
    g.shuffle(more.events);
    ASSERT_EQ(evaluate(replay(more), cfg).score, evaluate(replay(more), cfg).score);
  }
}

TEST(Report, EmptyStateSaysNoActivity) {
  FpdState st;
  auto r = render_report(st, FpdConfig::shipped(), evaluate(st, FpdConfig::shipped()));
  EXPECT_TRUE(r.groups.empty());
  EXPECT_EQ(r.summary, kNoActivitySummary);
  EXPECT_NE(r.to_text().find(std::string(kNoActivitySummary)), std::string::npos);
}

TEST(Report, ListsCanvasGroupWithCounts) {
  auto trace = parse_trace(slurp(testgen::data_dir() / "fixtures" / "fpd" /
                                 "fingerprinting" / "fingerprintjs_like.json"));
  auto st = replay(trace);
  auto r = render_report(st, FpdConfig::shipped(), evaluate(st, FpdConfig::shipped()));
  auto canvas = std::find_if(r.groups.begin(), r.groups.end(),
                             [](const auto& g) { return g.name == "canvas"; });
  ASSERT_NE(canvas, r.groups.end());
  EXPECT_EQ(canvas->endpoints,
            (std::vector<EndpointCount>{
                {"HTMLCanvasElement.prototype.toDataURL", 2},
                {"CanvasRenderingContext2D.prototype.fillText", 2}}));
  EXPECT_EQ(r.summary, "fingerprinting detected");
}

TEST(Report, JsonRoundTrip) {
  testgen::Gen g(62);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(
           testgen::data_dir() / "fixtures" / "fpd")) {
    if (entry.path().filename() == "expected.json" || !entry.is_regular_file())
      continue;
    auto st = replay(parse_trace(slurp(entry.path())));
    st.ingest({0, "Unscored.api", 2});
    auto r = render_report(st, FpdConfig::shipped(), evaluate(st, FpdConfig::shipped()));
    EXPECT_EQ(Report::from_json(r.to_json()), r) << entry.path();
    EXPECT_EQ(r.unclassified, (std::vector<EndpointCount>{{"Unscored.api", 2}}));
  }
}

TEST(Directives, OnlyBlockModeWithDetection) {
  FpdVerdict detected;
  detected.detected = true;
  EXPECT_EQ(block_directives(detected, Mode::kBlock),
            (std::vector<BlockDirective>{BlockDirective::kBlockSubsequentAsyncRequests,
                                         BlockDirective::kClearPageStorage}));
  EXPECT_TRUE(block_directives(detected, Mode::kPassive).empty());
  EXPECT_TRUE(block_directives(detected, Mode::kNotify).empty());
  EXPECT_TRUE(block_directives(FpdVerdict{}, Mode::kBlock).empty());
}

TEST(Corpus, FixtureScoresMatchHandEvaluation) {
  auto expected = nlohmann::json::parse(
      slurp(testgen::data_dir() / "fixtures" / "fpd" / "expected.json"));
  for (const auto& [file, score] : expected.items()) {
    auto st = replay(parse_trace(
        slurp(testgen::data_dir() / "fixtures" / "fpd" / file)));
    auto v = evaluate(st, FpdConfig::shipped());
    EXPECT_EQ(v.score, score.get<double>()) << file;
    EXPECT_EQ(v.detected, file.rfind("fingerprinting/", 0) == 0) << file;
  }
}
