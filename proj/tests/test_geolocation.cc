#include <gtest/gtest.h>

#include "fpshield/error.h"
#include "fpshield/geolocation.h"
#include "gen.h"

using namespace fpshield;
using namespace fpshield::farble;

namespace {

keyrand::FarbleSeed geo_seed(const std::string& origin = "https://a.example") {
  return keyrand::derive_seed(keyrand::SessionKey(std::array<uint8_t, 32>{}),
                              Origin::parse(origin), keyrand::tags::kGeolocation);
}

GeoCoordinate random_point(testgen::Gen& g, double max_abs_lat = 90) {
  GeoCoordinate c;
  c.latitude = g.real(-max_abs_lat, max_abs_lat);
  c.longitude = g.real(-180, 180);
  if (c.longitude == -180) c.longitude = 180;
  c.accuracy = g.real(0, 50);
  return c;
}

}  // namespace

TEST(Geo, OneMeterPrecisionStaysWithinTwoMeters) {
  testgen::Gen g(30);
  auto s = geo_seed();
  for (int i = 0; i < 1000; ++i) {
    auto c = random_point(g, 85);
    auto out = degrade_geolocation(s, c, 1.0);
    ASSERT_LE(great_circle_distance_m(c, out), 2.0)
        << c.latitude << "," << c.longitude;
  }
}

TEST(Geo, Deterministic) {
  auto s = geo_seed();
  GeoCoordinate c{50.0755, 14.4378, 12};
  EXPECT_EQ(degrade_geolocation(s, c, 500), degrade_geolocation(s, c, 500));
}

TEST(Geo, NearbyPointsInOneCellCollapse) {
  auto s = geo_seed();
  GeoCoordinate a{48.8566, 2.3522, 5};
  auto cell = geo_cell(s, a, 100000);
  // Walk 1 km east inside the cell; pick the side that stays inside.
  double dlon = 1000.0 / (kEarthRadiusM * std::cos(a.latitude * M_PI / 180)) *
                180 / M_PI;
  GeoCoordinate b = a;
  b.longitude = a.longitude + dlon;
  if (geo_cell(s, b, 100000) != cell) b.longitude = a.longitude - dlon;
  ASSERT_EQ(geo_cell(s, b, 100000), cell);
  EXPECT_NEAR(great_circle_distance_m(a, b), 1000, 1);
  EXPECT_EQ(degrade_geolocation(s, a, 100000), degrade_geolocation(s, b, 100000));
}

TEST(Geo, PropertySnapWithinCell) {
  testgen::Gen g(31);
  auto s = geo_seed();
  for (int i = 0; i < 300; ++i) {
    double precision = std::pow(10, g.real(1, 5));
    auto c = random_point(g);
    auto cell = geo_cell(s, c, precision);
    GeoCoordinate d = c;
    d.latitude = std::clamp(cell.lat_lo + g.real(0, 1) * cell.lat_step, -90.0, 90.0);
    d.longitude = cell.lon_lo + g.real(0, 1) * cell.lon_step;
    d.longitude = std::fmod(d.longitude + 180.0, 360.0);
    if (d.longitude <= 0) d.longitude += 360.0;
    d.longitude -= 180.0;
    if (geo_cell(s, d, precision) != cell) continue;  // landed on an edge
    auto out_c = degrade_geolocation(s, c, precision);
    auto out_d = degrade_geolocation(s, d, precision);
    ASSERT_EQ(out_c.latitude, out_d.latitude);
    ASSERT_EQ(out_c.longitude, out_d.longitude);
  }
}

TEST(Geo, PropertyValidIdempotentAccuracy) {
  testgen::Gen g(32);
  auto s = geo_seed();
  for (int i = 0; i < 2000; ++i) {
    double precision = std::pow(10, g.real(0, 6.5));
    auto c = random_point(g);
    if (i % 50 == 0) c.latitude = g.coin() ? 90 : -90;
    if (i % 50 == 1) c.longitude = 180;
    auto out = degrade_geolocation(s, c, precision);
    ASSERT_TRUE(is_valid(out)) << out.latitude << "," << out.longitude;
    ASSERT_EQ(out.accuracy, std::max(c.accuracy, precision));
    ASSERT_EQ(degrade_geolocation(s, out, precision), out)
        << c.latitude << "," << c.longitude << " @" << precision;
  }
}

TEST(Geo, AnchorsDifferAcrossOrigins) {
  GeoCoordinate c{40.0, -3.7, 1};
  EXPECT_NE(degrade_geolocation(geo_seed("https://a.example"), c, 5000),
            degrade_geolocation(geo_seed("https://b.example"), c, 5000));
}

TEST(Geo, RejectsBadInput) {
  auto s = geo_seed();
  EXPECT_THROW(degrade_geolocation(s, {91, 0, 0}, 10), InvalidArgument);
  EXPECT_THROW(degrade_geolocation(s, {0, -180, 0}, 10), InvalidArgument);
  EXPECT_THROW(degrade_geolocation(s, {0, 0, 0}, 0), InvalidArgument);
  EXPECT_THROW(degrade_geolocation(s, {0, 0, 0}, -5), InvalidArgument);
  EXPECT_THROW(degrade_geolocation(s, {std::nan(""), 0, 0}, 10), InvalidArgument);
}
