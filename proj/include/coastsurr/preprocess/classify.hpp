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

#include <span>
#include <vector>

#include "coastsurr/core/types.hpp"

namespace coastsurr {

struct PointClass {
  int c = 1;
  double d_prot = 0.0;    // km, +inf when no OLU is protected
  double d_unprot = 0.0;  // km, +inf when every OLU is protected
};

/// Minimum vertex distance (km) from `p` to each OLU boundary, indexed 0..K-1.
std::vector<double> olu_distances(LatLon p, const RegionSpec& region);

/// Combines per-OLU distances under a scenario. c = +1 iff d_unprot <= d_prot.
PointClass classify_from_distances(std::span<const double> distances,
                                   const ProtectionScenario& scenario);

PointClass classify_point(LatLon p, const ProtectionScenario& scenario, const RegionSpec& region);

}  // namespace coastsurr
