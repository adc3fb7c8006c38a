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
#include "coastsurr/core/types.hpp"

#include <cmath>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {

void RegionSpec::validate() const {
  if (olu_boundaries.empty()) throw ConfigError("region '" + name + "' defines no OLUs");
  for (std::size_t k = 0; k < olu_boundaries.size(); ++k) {
    if (olu_boundaries[k].empty()) {
      throw ConfigError("OLU " + std::to_string(k + 1) + " of region '" + name +
                        "' has no boundary vertices");
    }
    for (const auto& v : olu_boundaries[k]) {
      if (!std::isfinite(v.lat) || !std::isfinite(v.lon)) {
        throw ConfigError("OLU " + std::to_string(k + 1) + " has a non-finite vertex");
      }
    }
  }
  if (earth_radius_km != kEarthRadiusKm) {
    throw ConfigError("earth_radius_km must be 6367");
  }
}

void GridSpec::validate() const {
  if (n < 2) throw ConfigError("grid resolution must be at least 2");
  if (!(x_max > x_min)) throw ConfigError("grid x extent is empty (x_max <= x_min)");
  if (!(y_max > y_min)) throw ConfigError("grid y extent is empty (y_max <= y_min)");
}

Grid::Grid(int n, float fill)
    : n_(n), values_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {
  if (n < 0) throw ShapeError("negative grid size");
}

Grid::Grid(int n, std::vector<float> values) : n_(n), values_(std::move(values)) {
  if (n < 0 || values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw ShapeError("grid value count does not match n*n");
  }
}

std::size_t Grid::count_nonzero() const noexcept {
  std::size_t c = 0;
  for (float v : values_) c += (v != 0.0f);
  return c;
}

void Sample::validate() const {
  if (input.n() != output.n()) throw ShapeError("input and output grids differ in size");
  const auto in = input.values();
  const auto out = output.values();
  for (std::size_t k = 0; k < in.size(); ++k) {
    const float c = in[k];
    if (c != 0.0f && c != 1.0f && c != -1.0f) {
      throw ShapeError("input grid value outside {-1, 0, 1} at flat index " + std::to_string(k));
    }
    if (out[k] != 0.0f && c == 0.0f) {
      throw ShapeError("nonzero output without nonzero input at flat index " + std::to_string(k));
    }
  }
}

}  // namespace coastsurr
