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
#include "coastsurr/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/random.hpp"

namespace coastsurr {

void AugmentConfig::validate() const {
  if (multiplicity < 1) throw ConfigError("augment.multiplicity must be at least 1");
  if (cutout_size < 1 || cutout_size % 2 == 0) {
    throw ConfigError("augment.cutout_size must be a positive odd integer");
  }
  if (!(segment_fraction > 0.0 && segment_fraction <= 1.0)) {
    throw ConfigError("augment.segment_fraction must lie in (0, 1]");
  }
  if (!(scale_lo > 0.0) || !(scale_hi >= scale_lo)) {
    throw ConfigError("augment.scale_range must satisfy 0 < lo <= hi");
  }
}

int default_cutout_size(int n) {
  int s = static_cast<int>(std::lround(9.0 * n / 1024.0));
  if (s < 1) s = 1;
  if (s % 2 == 0) ++s;
  return s;
}

Sample random_remove(const Sample& sample, const AugmentConfig& cfg, std::uint64_t draw) {
  if (cfg.cutout_size < 1 || cfg.cutout_size % 2 == 0) {
    throw ConfigError("augment.cutout_size must be a positive odd integer");
  }
  if (!(cfg.segment_fraction >= 0.0 && cfg.segment_fraction <= 1.0)) {
    throw ConfigError("augment.segment_fraction must lie in [0, 1]");
  }
  Sample out = sample;
  Rng rng(cfg.seed, draw);
  const int n = sample.n();

  std::vector<std::size_t> nonzero;
  const auto in = sample.input.values();
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (in[k] != 0.0f) nonzero.push_back(k);
  }
  auto pick = static_cast<std::size_t>(
      std::ceil(cfg.segment_fraction * static_cast<double>(nonzero.size()) - 1e-9));
  if (cfg.segment_fraction > 0.0 && !nonzero.empty()) pick = std::max<std::size_t>(pick, 1);
  // Partial Fisher-Yates: the first `pick` entries become a uniform subset.
  for (std::size_t k = 0; k < pick; ++k) {
    const auto r = k + static_cast<std::size_t>(rng.below(nonzero.size() - k));
    std::swap(nonzero[k], nonzero[r]);
  }
  const int half = cfg.cutout_size / 2;
  for (std::size_t k = 0; k < pick; ++k) {
    const int ci = static_cast<int>(nonzero[k] / n);
    const int cj = static_cast<int>(nonzero[k] % n);
    for (int i = std::max(0, ci - half); i <= std::min(n - 1, ci + half); ++i) {
      for (int j = std::max(0, cj - half); j <= std::min(n - 1, cj + half); ++j) {
        out.input.at(i, j) = 0.0f;
      }
    }
  }

  if (cfg.scaling_enabled()) {
    const auto u = static_cast<float>(rng.uniform(cfg.scale_lo, cfg.scale_hi));
    for (auto& v : out.output.storage()) v *= u;
  }
  return out;
}

std::vector<Sample> expand_corpus(std::span<const Sample> samples, const AugmentConfig& cfg) {
  if (cfg.multiplicity < 1) throw ConfigError("augment.multiplicity must be at least 1");
  const auto m = static_cast<std::uint64_t>(cfg.multiplicity);
  std::vector<Sample> out;
  out.reserve(samples.size() * m);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    out.push_back(samples[s]);
    for (std::uint64_t d = 1; d < m; ++d) out.push_back(random_remove(samples[s], cfg, s * m + d));
  }
  return out;
}

}  // namespace coastsurr
