#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "cli.h"
#include "gen.h"
#include "json.hpp"

namespace {

const std::string kSession(64, '0');

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "fpshield");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = fpshield::cli::run(static_cast<int>(argv.size()), argv.data(), in,
                                out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& rel) {
  return std::string(testgen::data_dir()) + "/fixtures/" + rel;
}

}  // namespace

TEST(Cli, EmptyTraceReportsNoActivity) {
  auto r = run({"fpd", "analyze", "--trace", fixture("fpd/benign/empty.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("no fingerprinting activity"), std::string::npos) << r.out;
}

TEST(Cli, DetectionInBlockModeIsStillSuccess) {
  auto r = run({"fpd", "analyze", "--mode", "block", "--trace",
                fixture("fpd/fingerprinting/full_suite.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("directive: "), std::string::npos) << r.out;
}

TEST(Cli, FarbleIsDeterministicForPinnedSession) {
  std::vector<std::string> args{"--session", kSession, "--origin",
                                "https://a.example", "farble", "canvas", "--in",
                                fixture("media/white1x1.rgba")};
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  EXPECT_NE(a.err.find("action: little_lie"), std::string::npos);
}

TEST(Cli, ProfileRouting) {
  std::vector<std::string> base{"--session", kSession, "--origin",
                                "https://a.example", "--profile"};
  auto input = run({"--session", kSession, "--origin", "https://a.example",
                    "--profile", "p2", "farble", "canvas", "--in",
                    fixture("media/white1x1.rgba")});
  EXPECT_EQ(input.code, 0);
  EXPECT_NE(input.err.find("action: pass_through"), std::string::npos);
  auto lie = run({"--session", kSession, "--origin", "https://a.example",
                  "farble", "canvas", "--in", fixture("media/white1x1.rgba")});
  EXPECT_NE(input.out, lie.out);

  auto p3 = run({"--session", kSession, "--origin", "https://a.example",
                 "--profile", "p3", "spoof", "devices", "--count", "2"});
  EXPECT_EQ(p3.code, 0);
  EXPECT_NE(p3.err.find("action: block"), std::string::npos) << p3.err;
  auto p3gl = run({"--session", kSession, "--origin", "https://a.example",
                   "--profile", "p3", "spoof", "webgl"});
  EXPECT_NE(p3gl.err.find("action: fixed_fake"), std::string::npos) << p3gl.err;
}

TEST(Cli, NbsCheckPrintsBlock) {
  auto r = run({"nbs", "check", "--origin-class", "public", "--target",
                "127.0.0.1:6666", "--resolved", "127.0.0.1", "--mode",
                "preresolve"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "Block");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"farble", "canvas", "--bogus"}).code, 2);
  EXPECT_EQ(run({"--profile", "p9", "profiles"}).code, 2);
  // Keyed command without --origin.
  EXPECT_EQ(run({"spoof", "webgl"}).code, 2);
}

TEST(Cli, BadArgumentValuesAreUsageErrors) {
  EXPECT_EQ(run({"fpd", "analyze", "--trace", "/nonexistent/trace.json"}).code, 2);
  EXPECT_EQ(run({"--session", "zz", "--origin", "https://a.example", "spoof",
                 "webgl"})
                .code,
            2);
}

TEST(Cli, DomainErrorsExitOne) {
  EXPECT_EQ(run({"fpd", "analyze", "--trace", fixture("media/white1x1.rgba")}).code,
            1);
  EXPECT_EQ(run({"--origin", "https://", "spoof", "webgl"}).code, 1);
  EXPECT_EQ(run({"--session", kSession, "--origin", "https://a.example", "time",
                 "shield"},
                "12\nnot-a-number\n")
                .code,
            1);
}

TEST(Cli, MissingSessionIsDrawnAndEchoed) {
  auto r = run({"--origin", "https://a.example", "spoof", "devices", "--count", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.err.find("session: "), 0u) << r.err;
}

TEST(Cli, SensorsAndTimeAreDeterministic) {
  std::vector<std::string> s{"--session", kSession, "--origin", "https://a.example",
                             "sensors", "gen", "--sensor", "magnetometer",
                             "--duration", "1"};
  auto a = run(s), b = run(s);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "t_ms,x,y,z");

  std::vector<std::string> t{"--session", kSession, "--origin",
                             "https://a.example", "time", "shield"};
  auto ta = run(t, "0\n5\n17.5\n1000\n"), tb = run(t, "0\n5\n17.5\n1000\n");
  EXPECT_EQ(ta.code, 0) << ta.err;
  EXPECT_EQ(ta.out, tb.out);
}

TEST(Cli, GeoAndJsonOutputs) {
  auto r = run({"--session", kSession, "--origin", "https://a.example", "spoof",
                "geo", "--lat", "48.85", "--lon", "2.35"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("latitude"));
  auto f = run({"fpd", "analyze", "--json", "--trace",
                fixture("fpd/fingerprinting/canvas_fonts.json")});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_TRUE(nlohmann::json::parse(f.out).is_object());
}

TEST(Cli, VersionAndHelp) {
  auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("fpd config schema 1"), std::string::npos) << v.out;
  EXPECT_EQ(run({"nbs", "check", "--help"}).code, 0);
}
