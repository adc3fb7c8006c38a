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

#include <cstdint>
#include <span>
#include <vector>

#include "coastsurr/core/types.hpp"

namespace coastsurr {

struct AugmentConfig {
  int multiplicity = 1;
  int cutout_size = 9;
  double segment_fraction = 0.2;
  double scale_lo = 1.0;
  double scale_hi = 1.0;
  std::uint64_t seed = 0;

  bool scaling_enabled() const noexcept { return scale_lo != 1.0 || scale_hi != 1.0; }
  void validate() const;
};

/// Cutout edge for an n x n grid: 9 cells at n = 1024, scaled linearly and
/// rounded to the nearest odd size (minimum 1).
int default_cutout_size(int n);

/// Zeroes a cutout_size square in the input around ceil(fraction * count) of
/// the nonzero input cells, chosen by the (seed, draw) stream. The output grid
/// and SLR are left alone unless scaling is enabled.
Sample random_remove(const Sample& sample, const AugmentConfig& cfg, std::uint64_t draw);

/// Each sample followed by multiplicity - 1 occluded variants. Variant d of
/// sample s uses draw s * multiplicity + d; d = 0 is the untouched original.
std::vector<Sample> expand_corpus(std::span<const Sample> samples, const AugmentConfig& cfg);

}  // namespace coastsurr
