#include <gtest/gtest.h>

#include <cmath>

#include "fpshield/error.h"
#include "fpshield/origin_context.h"
#include "fpshield/timeshield.h"
#include "gen.h"
#include "oracle.h"

using namespace fpshield;
using namespace fpshield::timeshield;
using namespace std::chrono_literals;

namespace {

keyrand::FarbleSeed time_seed() {
  return keyrand::derive_seed(keyrand::SessionKey(std::array<uint8_t, 32>{}),
                              Origin::parse("https://a.example"),
                              keyrand::tags::kTime);
}

}  // namespace

TEST(Shield, FloorWhenNotRandomized) {
  EXPECT_EQ(shield_timestamp(time_seed(), 123.456, {10, false}), 120.0);
  EXPECT_EQ(shield_timestamp(time_seed(), 130.0, {10, false}), 130.0);
  EXPECT_EQ(shield_timestamp(time_seed(), 0.0, {10, false}), 0.0);
}

TEST(Shield, RandomizedValueMatchesOracle) {
  auto s = time_seed();
  double v = shield_timestamp(s, 123.456, {10, true});
  EXPECT_GE(v, 120.0);
  EXPECT_LT(v, 130.0);
  EXPECT_EQ(v, shield_timestamp(s, 123.456, {10, true}));
  EXPECT_EQ(v, 120.0 + oracle::uniform01(s.digest(), 12) * 10.0);
}

TEST(Shield, BucketZero) {
  for (bool r : {false, true}) {
    double v = shield_timestamp(time_seed(), 0, {7.5, r});
    EXPECT_GE(v, 0);
    EXPECT_LT(v, 7.5);
  }
}

TEST(Shield, RejectsBadInput) {
  auto s = time_seed();
  EXPECT_THROW(shield_timestamp(s, -1, {}), InvalidArgument);
  EXPECT_THROW(shield_timestamp(s, std::nan(""), {}), InvalidArgument);
  EXPECT_THROW(shield_timestamp(s, 1, {0, true}), InvalidArgument);
  EXPECT_THROW(shield_timestamp(s, 1, {-10, true}), InvalidArgument);
  EXPECT_THROW(shield_timestamp(s, 1e300, {1, true}), InvalidArgument);
}

TEST(Shield, BucketIndexExactAtEdges) {
  // 0.3 / 0.1 rounds to 2.9999999999999996 in binary.
  EXPECT_EQ(bucket_index(0.3, 0.1) * 0.1 <= 0.3, true);
  testgen::Gen g(40);
  for (int i = 0; i < 100000; ++i) {
    double q = g.real(0.001, 100);
    double t = g.real(0, 1e9);
    auto b = static_cast<double>(bucket_index(t, q));
    ASSERT_LE(b * q, t);
    ASSERT_GT((b + 1) * q, t);
  }
}

TEST(Shield, PropertyMonotoneBoundedQuantized) {
  testgen::Gen g(41);
  auto s = time_seed();
  for (int run = 0; run < 20; ++run) {
    // Quanta that are exact in binary get the exact modulus check; arbitrary
    // reals only promise the output is the rounded product bucket * q.
    static const double kExact[] = {10, 1, 5, 16, 100, 0.5, 0.25};
    bool exact = g.coin();
    double q = exact ? kExact[g.range(0, 6)] : g.real(0.01, 50);
    double t = g.real(0, 1e6);
    double prev_r = -1, prev_f = -1;
    for (int i = 0; i < 2000; ++i) {
      t += g.coin() ? 0 : g.real(0, 3 * q);
      double r = shield_timestamp(s, t, {q, true});
      double f = shield_timestamp(s, t, {q, false});
      ASSERT_GE(r, prev_r);
      ASSERT_GE(f, prev_f);
      ASSERT_LT(std::abs(r - t), q);
      ASSERT_LT(std::abs(f - t), q);
      if (exact)
        ASSERT_EQ(std::fmod(f, q), 0.0) << f << " q " << q;
      else
        ASSERT_EQ(f, static_cast<double>(bucket_index(t, q)) * q);
      prev_r = r;
      prev_f = f;
    }
  }
}

TEST(SensorTime, EpochInstantIsZeroBeforeShielding) {
  TimeShield ts(time_seed(), {10, false});
  ContextEpoch e{5000ms};
  EXPECT_EQ(ts.sensor_timestamp(e, 5000ms), 0.0);
}

TEST(SensorTime, SubtractsThenFloors) {
  TimeShield ts(time_seed(), {10, false});
  ContextEpoch e{from_ms(5000)};
  EXPECT_EQ(ts.sensor_timestamp(e, from_ms(5123.456)), 120.0);
}

TEST(SensorTime, BootOffsetCancels) {
  TimeShield ts(time_seed(), {10, true});
  testgen::Gen g(42);
  const MonotonicTime boot_a = from_ms(3.2e7);
  const MonotonicTime boot_b = boot_a + from_ms(1e6);
  for (int i = 0; i < 10000; ++i) {
    auto rel = MonotonicTime(g.range(0, int64_t{1} << 45));
    ASSERT_EQ(ts.sensor_timestamp({boot_a}, boot_a + rel),
              ts.sensor_timestamp({boot_b}, boot_b + rel));
  }
}

TEST(SensorTime, RejectsReadingBeforeEpoch) {
  TimeShield ts(time_seed(), {});
  EXPECT_THROW(ts.sensor_timestamp({10ms}, 5ms), InvalidArgument);
}

TEST(SensorTime, AllSourcesShareOneShield) {
  OriginContext ctx(keyrand::SessionKey(std::array<uint8_t, 32>{}),
                    Origin::parse("https://a.example"));
  auto state = ctx.device_state();
  for (double t : {0.0, 12.5, 999.0, 123456.789}) {
    EXPECT_EQ(ctx.time_shield().shield(t), shield_timestamp(time_seed(), t, {}));
    EXPECT_EQ(state.clock.shield(t), ctx.time_shield().shield(t));
  }
}
