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
#include "coastsurr/preprocess/classify.hpp"

#include <algorithm>
#include <limits>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/preprocess/geo.hpp"

namespace coastsurr {

std::vector<double> olu_distances(LatLon p, const RegionSpec& region) {
  std::vector<double> out(region.olu_count(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < region.olu_count(); ++k) {
    for (const auto& v : region.olu_boundaries[k]) {
      out[k] = std::min(out[k], geo::haversine_km(p, v, region.earth_radius_km));
    }
  }
  return out;
}

PointClass classify_from_distances(std::span<const double> distances,
                                   const ProtectionScenario& scenario) {
  if (distances.empty()) throw ConfigError("cannot classify a point against zero OLUs");
  if (distances.size() != scenario.olu_count()) {
    throw LengthError("scenario has " + std::to_string(scenario.olu_count()) +
                      " OLUs but distances were computed for " + std::to_string(distances.size()));
  }
  PointClass pc;
  pc.d_prot = std::numeric_limits<double>::infinity();
  pc.d_unprot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < distances.size(); ++k) {
    double& target = scenario.is_protected(k) ? pc.d_prot : pc.d_unprot;
    target = std::min(target, distances[k]);
  }
  pc.c = pc.d_unprot <= pc.d_prot ? 1 : -1;
  return pc;
}

PointClass classify_point(LatLon p, const ProtectionScenario& scenario, const RegionSpec& region) {
  return classify_from_distances(olu_distances(p, region), scenario);
}

}  // namespace coastsurr
