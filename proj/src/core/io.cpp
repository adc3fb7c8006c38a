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
#include "coastsurr/core/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coastsurr/core/errors.hpp"

#ifndef COASTSURR_DEFAULT_DATA_DIR
#define COASTSURR_DEFAULT_DATA_DIR "data"
#endif

namespace coastsurr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

json parse_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

RegionSpec region_from_json(const json& j) {
  RegionSpec r;
  try {
    r.name = j.value("name", std::string("region"));
    r.earth_radius_km = j.value("earth_radius_km", kEarthRadiusKm);
    const auto& olus = j.at("olus");
    r.olu_boundaries.assign(olus.size(), {});
    std::vector<bool> seen(olus.size(), false);
    for (const auto& olu : olus) {
      const auto index = olu.at("index").get<std::size_t>();
      if (index < 1 || index > olus.size() || seen[index - 1]) {
        throw ConfigError("OLU indices must cover 1.." + std::to_string(olus.size()) +
                          " exactly once (bad index " + std::to_string(index) + ")");
      }
      seen[index - 1] = true;
      for (const auto& v : olu.at("vertices")) {
        if (v.size() != 2) throw ConfigError("OLU vertices must be [lat, lon] pairs");
        r.olu_boundaries[index - 1].push_back({v[0].get<double>(), v[1].get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed region JSON: ") + e.what());
  }
  r.validate();
  return r;
}

json region_to_json(const RegionSpec& region) {
  json olus = json::array();
  for (std::size_t k = 0; k < region.olu_boundaries.size(); ++k) {
    json verts = json::array();
    for (const auto& v : region.olu_boundaries[k]) verts.push_back({v.lat, v.lon});
    olus.push_back({{"index", k + 1}, {"vertices", verts}});
  }
  return {{"name", region.name}, {"earth_radius_km", region.earth_radius_km}, {"olus", olus}};
}

RegionSpec load_region(const fs::path& path) { return region_from_json(parse_json_file(path)); }

void save_region(const RegionSpec& region, const fs::path& path) {
  write_text_file(path, region_to_json(region).dump(1));
}

json grid_spec_to_json(const GridSpec& spec) {
  return {{"n", spec.n},
          {"x_min", spec.x_min},
          {"x_max", spec.x_max},
          {"y_min", spec.y_min},
          {"y_max", spec.y_max}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec g;
  try {
    g.n = j.at("n").get<int>();
    g.x_min = j.at("x_min").get<double>();
    g.x_max = j.at("x_max").get<double>();
    g.y_min = j.at("y_min").get<double>();
    g.y_max = j.at("y_max").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed grid spec: ") + e.what());
  }
  g.validate();
  return g;
}

TensorContainer sample_to_container(const Sample& sample, const std::string& region_name,
                                    const std::optional<GridSpec>& grid) {
  TensorContainer c;
  const auto n = static_cast<std::int64_t>(sample.n());
  c.add("input", {n, n}, std::vector<float>(sample.input.values().begin(), sample.input.values().end()));
  c.add("output", {n, n},
        std::vector<float>(sample.output.values().begin(), sample.output.values().end()));
  c.metadata["kind"] = "sample";
  c.metadata["scenario"] = sample.scenario_id;
  c.metadata["slr_m"] = sample.slr_m;
  c.metadata["slr_text"] = format_slr(sample.slr_m);
  if (!region_name.empty()) c.metadata["region"] = region_name;
  if (grid) c.metadata["grid"] = grid_spec_to_json(*grid);
  return c;
}

Sample sample_from_container(const TensorContainer& c) {
  const auto& in = c.get("input");
  const auto& out = c.get("output");
  if (in.shape.size() != 2 || in.shape[0] != in.shape[1] || in.shape != out.shape) {
    throw ShapeError("sample container must hold two equal square [n, n] arrays");
  }
  Sample s;
  const int n = static_cast<int>(in.shape[0]);
  s.input = Grid(n, in.data);
  s.output = Grid(n, out.data);
  s.slr_m = c.metadata.value("slr_m", 0.0);
  s.scenario_id = c.metadata.value("scenario", std::string());
  return s;
}

void write_sample(const fs::path& path, const Sample& sample, const std::string& region_name,
                  const std::optional<GridSpec>& grid) {
  sample_to_container(sample, region_name, grid).write(path);
}

Sample read_sample(const fs::path& path) { return sample_from_container(TensorContainer::read(path)); }

bool Manifest::has_split(const std::string& split) const { return splits.count(split) != 0; }

std::size_t Manifest::split_size(const std::string& split) const {
  auto it = splits.find(split);
  return it == splits.end() ? 0 : it->second.size();
}

std::vector<Sample> Manifest::load_split(const std::string& split) const {
  auto it = splits.find(split);
  if (it == splits.end()) throw NotFoundError("manifest has no split named '" + split + "'");
  std::vector<Sample> out;
  out.reserve(it->second.size());
  for (const auto& rel : it->second) out.push_back(read_sample(base_dir / rel));
  return out;
}

json Manifest::to_json() const {
  json s = json::object();
  for (const auto& [name, files] : splits) s[name] = files;
  return {{"region", region},   {"n", n},      {"olu_count", olu_count},
          {"slr_levels", slr_levels}, {"splits", s}, {"table", table}};
}

void Manifest::write(const fs::path& path) const { write_text_file(path, to_json().dump(1)); }

Manifest Manifest::read(const fs::path& path) {
  const json j = parse_json_file(path);
  Manifest m;
  try {
    m.region = j.value("region", std::string());
    m.n = j.at("n").get<int>();
    m.olu_count = j.value("olu_count", std::size_t{0});
    m.slr_levels = j.value("slr_levels", std::vector<double>{});
    for (const auto& [name, files] : j.at("splits").items()) {
      m.splits[name] = files.get<std::vector<std::string>>();
    }
    m.table = j.value("table", json::array());
  } catch (const json::exception& e) {
    throw ParseError("malformed manifest '" + path.string() + "': " + e.what());
  }
  m.base_dir = path.parent_path();
  return m;
}

FixtureSet fixture_set_from_name(const std::string& name) {
  if (name == "ad_holdout") return FixtureSet::kAdHoldout;
  if (name == "sf_holdout") return FixtureSet::kSfHoldout;
  if (name == "sf_generalizability") return FixtureSet::kSfGeneralizability;
  throw ConfigError("unknown fixture set '" + name +
                    "' (expected ad_holdout, sf_holdout or sf_generalizability)");
}

std::string fixture_set_name(FixtureSet set) {
  switch (set) {
    case FixtureSet::kAdHoldout: return "ad_holdout";
    case FixtureSet::kSfHoldout: return "sf_holdout";
    case FixtureSet::kSfGeneralizability: return "sf_generalizability";
  }
  return {};
}

std::size_t fixture_olu_count(FixtureSet set) { return set == FixtureSet::kAdHoldout ? 17 : 30; }

fs::path data_dir() {
  if (const char* env = std::getenv("COASTSURR_DATA_DIR"); env && *env) return fs::path(env);
  return fs::path(COASTSURR_DEFAULT_DATA_DIR);
}

std::vector<ProtectionScenario> load_scenario_list(const fs::path& path, std::size_t olu_count) {
  std::ifstream f(path);
  if (!f) throw ConfigError("scenario list '" + path.string() + "' is missing");
  std::vector<ProtectionScenario> out;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(decode_scenario(line, olu_count));
  }
  return out;
}

std::vector<ProtectionScenario> load_fixture_scenarios(FixtureSet set) {
  const fs::path path = data_dir() / "fixtures" / (fixture_set_name(set) + ".txt");
  if (!fs::exists(path)) throw ConfigError("fixture file '" + path.string() + "' is missing");
  return load_scenario_list(path, fixture_olu_count(set));
}

}  // namespace coastsurr
