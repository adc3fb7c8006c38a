/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "coastsurr/core/types.hpp"

namespace coastsurr::geo {

/// Great-circle distance in km on a sphere of radius `radius_km`. Inputs are
/// degrees.
double haversine_km(LatLon a, LatLon b, double radius_km = kEarthRadiusKm) noexcept;

struct UtmCoord {
  double easting = 0.0;
  double northing = 0.0;
};

/// Inverse transverse Mercator (USGS series, WGS 84). Throws ConfigError for
/// zones outside 1..60.
LatLon utm_to_latlon(double easting, double northing, int zone, bool northern);

/// Forward transverse Mercator (USGS series, WGS 84).
UtmCoord latlon_to_utm(LatLon p, int zone, bool northern);

double utm_central_meridian_deg(int zone);

/// How a region's raw table coordinates relate to latitude/longitude.
struct CoordinateSystem {
  enum class Kind { kLatLon, kUtm };
  Kind kind = Kind::kLatLon;
  int zone = 0;
  bool northern = true;

  static CoordinateSystem lat_lon() { return {}; }
  static CoordinateSystem utm(int zone, bool northern);

  /// (x, y) in table units to lat/lon. Lat/lon tables store longitude in x
  /// and latitude in y; this mode is the identity passthrough.
  LatLon to_lat_lon(double x, double y) const;
};

}  // namespace coastsurr::geo
