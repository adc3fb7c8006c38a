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

#include <filesystem>
#include <span>
#include <vector>

#include "coastsurr/core/tensor_container.hpp"
#include "coastsurr/core/types.hpp"
#include "coastsurr/preprocess/geo.hpp"
#include "coastsurr/preprocess/grid_mapping.hpp"

namespace coastsurr {

/// Rasterizes one table: input[i',j'] = c_i, output[i',j'] = pwl_i for every
/// mapped point, zero elsewhere.
Sample build_sample(const InundationTable& table, const RegionSpec& region, const GridSpec& spec,
                    const geo::CoordinateSystem& crs = geo::CoordinateSystem::lat_lon());

/// The set of cells a region's tables populate together with each cell's
/// distance to every OLU. Scenario-independent, so the input grid for any
/// protection vector can be rebuilt without a simulator table.
struct Footprint {
  GridSpec spec;
  std::size_t olu_count = 0;
  std::vector<Cell> cells;
  std::vector<float> distances_km;  // cells.size() x olu_count, row-major

  std::size_t size() const noexcept { return cells.size(); }

  /// Classification grid for `scenario`; output and scenario_id are left
  /// empty.
  Grid input_for(const ProtectionScenario& scenario) const;

  TensorContainer to_container() const;
  static Footprint from_container(const TensorContainer& c);
  void write(const std::filesystem::path& path) const;
  static Footprint read(const std::filesystem::path& path);
};

/// Footprint of a set of points after conflict resolution.
Footprint build_footprint(std::span<const InundationPoint> points, const RegionSpec& region,
                          const GridSpec& spec,
                          const geo::CoordinateSystem& crs = geo::CoordinateSystem::lat_lon());

/// Normalized PWL histogram. Bin 0 holds exact zeros; the remaining `bins`
/// bins split (0, max_pwl] uniformly.
struct PwlHistogram {
  double zero_mass = 0.0;
  double max_pwl = 0.0;
  std::size_t total_cells = 0;
  std::vector<double> edges;   // bins + 1 edges of the positive bins
  std::vector<double> masses;  // positive-bin masses

  double total_mass() const noexcept;
};

PwlHistogram pwl_histogram(std::span<const Sample> samples, int bins = 20);

/// CSV with a header row naming x, y and pwl columns (any order, extra
/// columns ignored). The scenario is decoded from the file stem.
InundationTable read_inundation_csv(const std::filesystem::path& path, std::size_t olu_count);
void write_inundation_csv(const std::filesystem::path& path, const InundationTable& table);

}  // namespace coastsurr
