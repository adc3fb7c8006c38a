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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coastsurr/core/scenario.hpp"

namespace coastsurr {

/// Raw simulator output row. `x` is easting or longitude, `y` northing or
/// latitude, in the region's CRS units; `pwl` is the peak water level in m.
struct InundationPoint {
  double x = 0.0;
  double y = 0.0;
  double pwl = 0.0;
};

struct InundationTable {
  ProtectionScenario scenario;
  std::vector<InundationPoint> points;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kEarthRadiusKm = 6367.0;

/// OLU boundary geometry. Boundaries are indexed 0..K-1 here and 1..K in the
/// on-disk JSON.
struct RegionSpec {
  std::string name;
  std::vector<std::vector<LatLon>> olu_boundaries;
  double earth_radius_km = kEarthRadiusKm;

  std::size_t olu_count() const noexcept { return olu_boundaries.size(); }
  void validate() const;
};

/// The N x N rasterization frame shared by every sample of a region.
struct GridSpec {
  int n = 1024;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Dense n x n float grid, row-major, indexed (i', j').
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n, float fill = 0.0f);
  Grid(int n, std::vector<float> values);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }

  float& at(int i, int j) { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  float at(int i, int j) const { return values_[static_cast<std::size_t>(i) * n_ + j]; }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }
  std::vector<float>& storage() noexcept { return values_; }

  std::size_t count_nonzero() const noexcept;
  bool operator==(const Grid&) const = default;

 private:
  int n_ = 0;
  std::vector<float> values_;
};

/// One training pair: protection-context classes in {-1, 0, +1}, the SLR
/// scalar, and the peak-water-level target grid.
struct Sample {
  Grid input;
  double slr_m = 0.0;
  Grid output;
  std::string scenario_id;

  int n() const noexcept { return input.n(); }
  /// Checks the value set of the input and that nonzero output cells are
  /// backed by nonzero input cells. Throws ShapeError on violation.
  void validate() const;
};

}  // namespace coastsurr
