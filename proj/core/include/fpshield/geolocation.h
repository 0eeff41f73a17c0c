#ifndef FPSHIELD_GEOLOCATION_H_
#define FPSHIELD_GEOLOCATION_H_

#include "fpshield/keyrand.h"

namespace fpshield::farble {

struct GeoCoordinate {
  double latitude = 0;   // [-90, 90]
  double longitude = 0;  // (-180, 180]
  double accuracy = 0;   // meters

  friend bool operator==(const GeoCoordinate&, const GeoCoordinate&) = default;
};

// Mean Earth radius (IUGG), meters.
inline constexpr double kEarthRadiusM = 6371008.8;

bool is_valid(const GeoCoordinate& c);

double great_circle_distance_m(const GeoCoordinate& a, const GeoCoordinate& b);

// Grid cell of a degraded position. Latitude bands are |precision_m| tall and
// start at a keyed anchor; within a band the longitude cells are as wide as
// |precision_m| at the band's central latitude, rounded so that a whole
// number of cells spans 360 degrees.
struct GeoCell {
  int64_t lat_index = 0;
  int64_t lon_index = 0;
  double lat_lo = 0;
  double lat_step = 0;
  double lon_lo = 0;
  double lon_step = 0;

  friend bool operator==(const GeoCell&, const GeoCell&) = default;
};

GeoCell geo_cell(const keyrand::FarbleSeed& seed, const GeoCoordinate& c,
                 double precision_m);

// Snaps |c| to its keyed cell and reports a keyed point inside that cell.
// Accuracy becomes max(c.accuracy, precision_m). Re-degrading an output with
// the same seed and precision returns it unchanged.
//
// Throws InvalidArgument for an out-of-range coordinate or precision <= 0.
GeoCoordinate degrade_geolocation(const keyrand::FarbleSeed& seed,
                                  const GeoCoordinate& c, double precision_m);

}  // namespace fpshield::farble

#endif  // FPSHIELD_GEOLOCATION_H_
