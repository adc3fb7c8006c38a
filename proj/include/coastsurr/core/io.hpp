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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/core/tensor_container.hpp"
#include "coastsurr/core/types.hpp"

namespace coastsurr {

// Region boundary JSON:
//   {"name": "AD", "earth_radius_km": 6367,
//    "olus": [{"index": 1, "vertices": [[lat, lon], ...]}, ...]}
// OLUs may appear in any order; indices must cover 1..K exactly.
RegionSpec region_from_json(const nlohmann::json& j);
nlohmann::json region_to_json(const RegionSpec& region);
RegionSpec load_region(const std::filesystem::path& path);
void save_region(const RegionSpec& region, const std::filesystem::path& path);

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// Sample <-> container. Arrays "input" and "output" have shape [n, n];
/// metadata carries the scenario string, SLR (and its original text), and
/// optionally the region name and grid spec.
TensorContainer sample_to_container(const Sample& sample, const std::string& region_name = {},
                                    const std::optional<GridSpec>& grid = std::nullopt);
Sample sample_from_container(const TensorContainer& c);
void write_sample(const std::filesystem::path& path, const Sample& sample,
                  const std::string& region_name = {},
                  const std::optional<GridSpec>& grid = std::nullopt);
Sample read_sample(const std::filesystem::path& path);

/// Dataset manifest. Sample paths are relative to the manifest's directory.
///
///   {"region": "synthetic", "n": 64, "olu_count": 8, "slr_levels": [1.0, 1.5],
///    "splits": {"train": ["samples/x.cstc", ...], "val": [...], ...},
///    "table": [{"region":..., "slr":..., "total":..., "train":..., ...}]}
struct Manifest {
  std::string region;
  int n = 0;
  std::size_t olu_count = 0;
  std::vector<double> slr_levels;
  std::map<std::string, std::vector<std::string>> splits;
  nlohmann::json table = nlohmann::json::array();
  std::filesystem::path base_dir;

  std::vector<Sample> load_split(const std::string& split) const;
  bool has_split(const std::string& split) const;
  std::size_t split_size(const std::string& split) const;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);
};

enum class FixtureSet { kAdHoldout, kSfHoldout, kSfGeneralizability };

FixtureSet fixture_set_from_name(const std::string& name);
std::string fixture_set_name(FixtureSet set);
std::size_t fixture_olu_count(FixtureSet set);

/// Directory holding fixtures; COASTSURR_DATA_DIR overrides the built-in path.
std::filesystem::path data_dir();

/// Reads the shipped scenario list. Throws ConfigError if the file is missing.
std::vector<ProtectionScenario> load_fixture_scenarios(FixtureSet set);
std::vector<ProtectionScenario> load_scenario_list(const std::filesystem::path& path,
                                                   std::size_t olu_count);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace coastsurr
