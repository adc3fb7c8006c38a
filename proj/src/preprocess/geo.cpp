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
#include "coastsurr/preprocess/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coastsurr/core/errors.hpp"

namespace coastsurr::geo {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// WGS 84
constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kE2 = kF * (2.0 - kF);
constexpr double kEp2 = kE2 / (1.0 - kE2);
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

void check_zone(int zone) {
  if (zone < 1 || zone > 60) {
    throw ConfigError("UTM zone " + std::to_string(zone) + " is outside 1..60");
  }
}

}  // namespace

double haversine_km(LatLon a, LatLon b, double radius_km) noexcept {
  const double lat1 = a.lat * kDeg;
  const double lat2 = b.lat * kDeg;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * radius_km * std::asin(std::sqrt(h));
}

double utm_central_meridian_deg(int zone) {
  check_zone(zone);
  return (zone - 1) * 6.0 - 180.0 + 3.0;
}

LatLon utm_to_latlon(double easting, double northing, int zone, bool northern) {
  const double lon0 = utm_central_meridian_deg(zone) * kDeg;
  const double x = easting - kFalseEasting;
  const double y = northern ? northing : northing - kFalseNorthingSouth;

  const double e4 = kE2 * kE2;
  const double e6 = e4 * kE2;
  const double m = y / kK0;
  const double mu = m / (kA * (1.0 - kE2 / 4.0 - 3.0 * e4 / 64.0 - 5.0 * e6 / 256.0));
  const double s = std::sqrt(1.0 - kE2);
  const double e1 = (1.0 - s) / (1.0 + s);
  const double e1_2 = e1 * e1;
  const double e1_3 = e1_2 * e1;
  const double e1_4 = e1_3 * e1;
  const double phi1 = mu + (3.0 * e1 / 2.0 - 27.0 * e1_3 / 32.0) * std::sin(2.0 * mu) +
                      (21.0 * e1_2 / 16.0 - 55.0 * e1_4 / 32.0) * std::sin(4.0 * mu) +
                      (151.0 * e1_3 / 96.0) * std::sin(6.0 * mu) +
                      (1097.0 * e1_4 / 512.0) * std::sin(8.0 * mu);

  const double sin1 = std::sin(phi1);
  const double cos1 = std::cos(phi1);
  const double tan1 = std::tan(phi1);
  const double c1 = kEp2 * cos1 * cos1;
  const double t1 = tan1 * tan1;
  const double w = 1.0 - kE2 * sin1 * sin1;
  const double n1 = kA / std::sqrt(w);
  const double r1 = kA * (1.0 - kE2) / (w * std::sqrt(w));
  const double d = x / (n1 * kK0);
  const double d2 = d * d;
  const double d3 = d2 * d;
  const double d4 = d3 * d;
  const double d5 = d4 * d;
  const double d6 = d5 * d;

  const double lat =
      phi1 - (n1 * tan1 / r1) *
                 (d2 / 2.0 - (5.0 + 3.0 * t1 + 10.0 * c1 - 4.0 * c1 * c1 - 9.0 * kEp2) * d4 / 24.0 +
                  (61.0 + 90.0 * t1 + 298.0 * c1 + 45.0 * t1 * t1 - 252.0 * kEp2 - 3.0 * c1 * c1) *
                      d6 / 720.0);
  const double lon =
      lon0 + (d - (1.0 + 2.0 * t1 + c1) * d3 / 6.0 +
              (5.0 - 2.0 * c1 + 28.0 * t1 - 3.0 * c1 * c1 + 8.0 * kEp2 + 24.0 * t1 * t1) * d5 /
                  120.0) /
                 cos1;
  return {lat / kDeg, lon / kDeg};
}

UtmCoord latlon_to_utm(LatLon p, int zone, bool northern) {
  const double lon0 = utm_central_meridian_deg(zone) * kDeg;
  const double phi = p.lat * kDeg;
  const double lam = p.lon * kDeg;
  const double e4 = kE2 * kE2;
  const double e6 = e4 * kE2;

  const double sinp = std::sin(phi);
  const double cosp = std::cos(phi);
  const double tanp = std::tan(phi);
  const double n = kA / std::sqrt(1.0 - kE2 * sinp * sinp);
  const double t = tanp * tanp;
  const double c = kEp2 * cosp * cosp;
  const double a = (lam - lon0) * cosp;
  const double m =
      kA * ((1.0 - kE2 / 4.0 - 3.0 * e4 / 64.0 - 5.0 * e6 / 256.0) * phi -
            (3.0 * kE2 / 8.0 + 3.0 * e4 / 32.0 + 45.0 * e6 / 1024.0) * std::sin(2.0 * phi) +
            (15.0 * e4 / 256.0 + 45.0 * e6 / 1024.0) * std::sin(4.0 * phi) -
            (35.0 * e6 / 3072.0) * std::sin(6.0 * phi));
  const double a2 = a * a;
  const double a3 = a2 * a;
  const double a4 = a3 * a;
  const double a5 = a4 * a;
  const double a6 = a5 * a;

  UtmCoord out;
  out.easting = kK0 * n *
                    (a + (1.0 - t + c) * a3 / 6.0 +
                     (5.0 - 18.0 * t + t * t + 72.0 * c - 58.0 * kEp2) * a5 / 120.0) +
                kFalseEasting;
  out.northing = kK0 * (m + n * tanp *
                                (a2 / 2.0 + (5.0 - t + 9.0 * c + 4.0 * c * c) * a4 / 24.0 +
                                 (61.0 - 58.0 * t + t * t + 600.0 * c - 330.0 * kEp2) * a6 / 720.0));
  if (!northern) out.northing += kFalseNorthingSouth;
  return out;
}

CoordinateSystem CoordinateSystem::utm(int zone, bool northern) {
  check_zone(zone);
  CoordinateSystem c;
  c.kind = Kind::kUtm;
  c.zone = zone;
  c.northern = northern;
  return c;
}

LatLon CoordinateSystem::to_lat_lon(double x, double y) const {
  if (kind == Kind::kLatLon) return {y, x};
  return utm_to_latlon(x, y, zone, northern);
}

}  // namespace coastsurr::geo
