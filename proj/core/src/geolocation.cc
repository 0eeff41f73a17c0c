#include "fpshield/geolocation.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpshield/error.h"

namespace fpshield::farble {

namespace {

constexpr double kMetersPerDegree = std::numbers::pi * kEarthRadiusM / 180.0;

// Keyed draws: 0 and 1 shift the grid, 2 and 3 place the point in the cell.
// The in-cell fraction stays clear of the cell edges so re-snapping an output
// lands in the same cell despite rounding.
double in_cell_fraction(const keyrand::FarbleSeed& seed, uint64_t index) {
  return 0.1 + 0.8 * keyrand::uniform01(seed, index);
}

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

bool is_valid(const GeoCoordinate& c) {
  return std::isfinite(c.latitude) && std::isfinite(c.longitude) &&
         std::isfinite(c.accuracy) && c.latitude >= -90 && c.latitude <= 90 &&
         c.longitude > -180 && c.longitude <= 180 && c.accuracy >= 0;
}

double great_circle_distance_m(const GeoCoordinate& a, const GeoCoordinate& b) {
  double p1 = radians(a.latitude), p2 = radians(b.latitude);
  double dp = p2 - p1;
  double dl = radians(b.longitude - a.longitude);
  double h = std::sin(dp / 2) * std::sin(dp / 2) +
             std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

GeoCell geo_cell(const keyrand::FarbleSeed& seed, const GeoCoordinate& c,
                 double precision_m) {
  if (!is_valid(c)) throw InvalidArgument("invalid geographic coordinate");
  if (!(precision_m > 0) || !std::isfinite(precision_m))
    throw InvalidArgument("geolocation precision must be > 0 meters");

  GeoCell cell;
  const double lat_shift = keyrand::uniform01(seed, 0);
  cell.lat_step = precision_m / kMetersPerDegree;
  auto lat_lo = [&](int64_t i) {
    return -90.0 + (static_cast<double>(i) - lat_shift) * cell.lat_step;
  };
  int64_t i = static_cast<int64_t>(
      std::floor((c.latitude + 90.0) / cell.lat_step + lat_shift));
  if (c.latitude < lat_lo(i)) --i;
  if (c.latitude >= lat_lo(i + 1)) ++i;
  cell.lat_index = i;
  cell.lat_lo = lat_lo(i);

  const double band_center =
      std::clamp(cell.lat_lo + cell.lat_step / 2, -90.0, 90.0);
  const double cos_lat = std::cos(radians(band_center));
  int64_t cells = 1;
  if (cos_lat > 1e-12) {
    double raw_step = precision_m / (kMetersPerDegree * cos_lat);
    cells = std::max<int64_t>(1, static_cast<int64_t>(std::floor(360.0 / raw_step)));
  }
  cell.lon_step = 360.0 / static_cast<double>(cells);

  const double lon_shift = keyrand::uniform01(seed, 1);
  auto lon_lo = [&](int64_t j) {
    return -180.0 + (static_cast<double>(j) - lon_shift) * cell.lon_step;
  };
  int64_t j = static_cast<int64_t>(
      std::floor((c.longitude + 180.0) / cell.lon_step + lon_shift));
  if (c.longitude < lon_lo(j)) --j;
  if (c.longitude >= lon_lo(j + 1)) ++j;
  // Cells repeat every 360 degrees; report the canonical copy so both sides
  // of the antimeridian produce bit-identical output.
  cell.lon_index = ((j % cells) + cells) % cells;
  cell.lon_lo = lon_lo(cell.lon_index);
  return cell;
}

GeoCoordinate degrade_geolocation(const keyrand::FarbleSeed& seed,
                                  const GeoCoordinate& c, double precision_m) {
  GeoCell cell = geo_cell(seed, c, precision_m);

  GeoCoordinate out;
  out.latitude = std::clamp(
      cell.lat_lo + in_cell_fraction(seed, 2) * cell.lat_step, -90.0, 90.0);
  double lon = cell.lon_lo + in_cell_fraction(seed, 3) * cell.lon_step;
  lon = std::fmod(lon + 180.0, 360.0);
  if (lon <= 0) lon += 360.0;
  out.longitude = lon - 180.0;
  out.accuracy = std::max(c.accuracy, precision_m);
  return out;
}

}  // namespace fpshield::farble
