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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "coastsurr/core/io.hpp"
#include "coastsurr/core/types.hpp"
#include "coastsurr/preprocess/sample_builder.hpp"

namespace coastsurr {

/// Toy coastline. The sea lies beyond column 0 of the grid; column 0 is split
/// into k_olus contiguous row segments, one per OLU. Water spreads inland from
/// every segment with exponential decay, damped to `leak` behind a seawall:
///
///   raw(i, j) = slr_gain * slr * max_s w_s * exp(-d_s(i, j) / decay_cells)
///   pwl(i, j) = max(0, raw - dry_cut)   for j < footprint_cols, else 0
///
/// where d_s is the Euclidean cell distance to segment s and w_s is 1 when
/// OLU s is unprotected, `leak` otherwise.
struct SynthConfig {
  int n = 64;
  int k_olus = 8;
  double decay_cells = 8.0;
  double slr_gain = 1.0;
  double leak = 0.15;
  double noise_sd = 0.0;
  double dry_cut = 0.5;
  int footprint_cols = 0;  // 0 selects n / 4
  double origin_lat = 24.0;
  double origin_lon = 54.0;
  double cell_deg = 0.001;
  std::uint64_t seed = 0;

  int effective_footprint_cols() const noexcept { return footprint_cols > 0 ? footprint_cols : n / 4; }
  void validate() const;
};

/// OLU boundaries: one vertex per row of each segment, half a cell seaward of
/// column 0.
RegionSpec synth_region(const SynthConfig& cfg);
GridSpec synth_grid_spec(const SynthConfig& cfg);
/// Simulator-style table with one point per footprint cell, in lon/lat.
InundationTable synth_table(const ProtectionScenario& scenario, const SynthConfig& cfg);
Footprint synth_footprint(const SynthConfig& cfg);

/// Analytic PWL field (no noise), n x n.
Grid synth_pwl(const ProtectionScenario& scenario, const SynthConfig& cfg);

/// Sample with input from the preprocess classification of the footprint.
Sample generate(const ProtectionScenario& scenario, const SynthConfig& cfg);
Sample generate(const ProtectionScenario& scenario, const SynthConfig& cfg, const Footprint& fp);

struct SplitPlan {
  std::string name;
  std::size_t count = 0;
  std::vector<double> slr_levels;  // empty: use the corpus levels
};

struct CorpusPlan {
  std::vector<double> slr_levels = {1.0, 1.5};
  std::vector<SplitPlan> splits = {{"train", 80, {}}, {"val", 10, {}}, {"test", 10, {}}};
  std::uint64_t seed = 0;
};

/// Scenario lists per split. Protection vectors are distinct across every
/// split; SLR levels are dealt round-robin after a seeded shuffle.
std::map<std::string, std::vector<ProtectionScenario>> plan_corpus(const SynthConfig& cfg,
                                                                    const CorpusPlan& plan);

/// Writes samples, region.json and footprint.cstc under `dir` and returns the
/// manifest written to dir/manifest.json.
Manifest write_corpus(const std::filesystem::path& dir, const SynthConfig& cfg,
                      const CorpusPlan& plan);

/// Writes one CSV table per scenario plus region.json, for exercising the
/// preprocess path end to end.
void write_synth_tables(const std::filesystem::path& dir, const SynthConfig& cfg,
                        const std::vector<ProtectionScenario>& scenarios);

}  // namespace coastsurr
