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
#include "coastsurr/synth/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/random.hpp"

namespace coastsurr {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int segment_lo(int s, const SynthConfig& cfg) { return s * cfg.n / cfg.k_olus; }

double segment_distance(int i, int j, int s, const SynthConfig& cfg) {
  const int lo = segment_lo(s, cfg);
  const int hi = segment_lo(s + 1, cfg);
  int di = 0;
  if (i < lo) di = lo - i;
  if (i >= hi) di = i - (hi - 1);
  return std::sqrt(static_cast<double>(di) * di + static_cast<double>(j) * j);
}

void check_scenario(const ProtectionScenario& scenario, const SynthConfig& cfg) {
  if (scenario.olu_count() != static_cast<std::size_t>(cfg.k_olus)) {
    throw LengthError("scenario has " + std::to_string(scenario.olu_count()) +
                      " OLUs, synthetic coastline has " + std::to_string(cfg.k_olus));
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n < 16) throw ConfigError("synth.n must be at least 16");
  if (k_olus < 2) throw ConfigError("synth.k_olus must be at least 2");
  if (k_olus > n) throw ConfigError("synth.k_olus cannot exceed synth.n");
  if (!(decay_cells > 0.0)) throw ConfigError("synth.decay_cells must be positive");
  if (!(leak >= 0.0 && leak < 1.0)) throw ConfigError("synth.leak must lie in [0, 1)");
  if (!(slr_gain >= 0.0)) throw ConfigError("synth.slr_gain must be non-negative");
  if (!(noise_sd >= 0.0)) throw ConfigError("synth.noise_sd must be non-negative");
  if (!(dry_cut >= 0.0)) throw ConfigError("synth.dry_cut must be non-negative");
  if (footprint_cols < 0 || footprint_cols > n) {
    throw ConfigError("synth.footprint_cols must lie in 0..n");
  }
  if (!(cell_deg > 0.0)) throw ConfigError("synth.cell_deg must be positive");
}

RegionSpec synth_region(const SynthConfig& cfg) {
  cfg.validate();
  RegionSpec r;
  r.name = "synthetic";
  r.olu_boundaries.resize(static_cast<std::size_t>(cfg.k_olus));
  const double lat = cfg.origin_lat - 0.5 * cfg.cell_deg;
  for (int s = 0; s < cfg.k_olus; ++s) {
    for (int i = segment_lo(s, cfg); i < segment_lo(s + 1, cfg); ++i) {
      r.olu_boundaries[s].push_back({lat, cfg.origin_lon + (i + 0.5) * cfg.cell_deg});
    }
  }
  return r;
}

GridSpec synth_grid_spec(const SynthConfig& cfg) {
  cfg.validate();
  const double span = (cfg.n - 1) * cfg.cell_deg;
  return {cfg.n, cfg.origin_lon, cfg.origin_lon + span, cfg.origin_lat, cfg.origin_lat + span};
}

namespace {

std::vector<InundationPoint> footprint_points(const SynthConfig& cfg) {
  std::vector<InundationPoint> pts;
  const int cols = cfg.effective_footprint_cols();
  pts.reserve(static_cast<std::size_t>(cfg.n) * cols);
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cols; ++j) {
      pts.push_back({cfg.origin_lon + (i + 0.5) * cfg.cell_deg,
                     cfg.origin_lat + (j + 0.5) * cfg.cell_deg, 0.0});
    }
  }
  return pts;
}

}  // namespace

Footprint synth_footprint(const SynthConfig& cfg) {
  return build_footprint(footprint_points(cfg), synth_region(cfg), synth_grid_spec(cfg));
}

Grid synth_pwl(const ProtectionScenario& scenario, const SynthConfig& cfg) {
  cfg.validate();
  check_scenario(scenario, cfg);
  Grid g(cfg.n);
  const double amp = cfg.slr_gain * scenario.slr_m();
  const int cols = cfg.effective_footprint_cols();
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cols; ++j) {
      double best = 0.0;
      for (int s = 0; s < cfg.k_olus; ++s) {
        const double w = scenario.is_protected(static_cast<std::size_t>(s)) ? cfg.leak : 1.0;
        best = std::max(best, w * std::exp(-segment_distance(i, j, s, cfg) / cfg.decay_cells));
      }
      g.at(i, j) = static_cast<float>(std::max(0.0, amp * best - cfg.dry_cut));
    }
  }
  return g;
}

InundationTable synth_table(const ProtectionScenario& scenario, const SynthConfig& cfg) {
  const Grid pwl = synth_pwl(scenario, cfg);
  InundationTable t{scenario, footprint_points(cfg)};
  const int cols = cfg.effective_footprint_cols();
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    t.points[k].pwl = pwl.at(static_cast<int>(k) / cols, static_cast<int>(k) % cols);
  }
  return t;
}

Sample generate(const ProtectionScenario& scenario, const SynthConfig& cfg, const Footprint& fp) {
  Sample s;
  s.output = synth_pwl(scenario, cfg);
  s.input = fp.input_for(scenario);
  s.slr_m = scenario.slr_m();
  s.scenario_id = encode_scenario(scenario);
  if (cfg.noise_sd > 0.0) {
    Rng rng(cfg.seed, fnv1a(s.scenario_id));
    for (auto& v : s.output.storage()) {
      if (v > 0.0f) v = std::max(0.0f, v + static_cast<float>(cfg.noise_sd * rng.normal()));
    }
  }
  return s;
}

Sample generate(const ProtectionScenario& scenario, const SynthConfig& cfg) {
  return generate(scenario, cfg, synth_footprint(cfg));
}

std::map<std::string, std::vector<ProtectionScenario>> plan_corpus(const SynthConfig& cfg,
                                                                    const CorpusPlan& plan) {
  cfg.validate();
  std::size_t total = 0;
  for (const auto& sp : plan.splits) total += sp.count;
  const auto k = static_cast<std::size_t>(cfg.k_olus);
  if (k < 63 && total > (std::uint64_t{1} << k)) {
    throw ConfigError("corpus needs " + std::to_string(total) +
                      " distinct protection vectors but only 2^" + std::to_string(k) + " exist");
  }
  Rng rng(plan.seed, 0x5C3A);
  std::vector<std::vector<std::uint8_t>> vectors;
  if (k <= 20) {
    std::vector<std::uint64_t> codes(std::uint64_t{1} << k);
    for (std::uint64_t c = 0; c < codes.size(); ++c) codes[c] = c;
    rng.shuffle(codes);
    for (std::size_t v = 0; v < total; ++v) {
      std::vector<std::uint8_t> bits(k);
      for (std::size_t b = 0; b < k; ++b) bits[b] = static_cast<std::uint8_t>((codes[v] >> b) & 1);
      vectors.push_back(std::move(bits));
    }
  } else {
    std::set<std::vector<std::uint8_t>> seen;
    while (vectors.size() < total) {
      std::vector<std::uint8_t> bits(k);
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
      if (seen.insert(bits).second) vectors.push_back(std::move(bits));
    }
  }

  std::map<std::string, std::vector<ProtectionScenario>> out;
  std::size_t cursor = 0;
  for (const auto& sp : plan.splits) {
    const auto& levels = sp.slr_levels.empty() ? plan.slr_levels : sp.slr_levels;
    if (levels.empty()) throw ConfigError("split '" + sp.name + "' has no SLR levels");
    if (out.count(sp.name)) throw ConfigError("duplicate split name '" + sp.name + "'");
    auto& list = out[sp.name];
    for (std::size_t q = 0; q < sp.count; ++q) {
      list.emplace_back(vectors[cursor++], levels[q % levels.size()]);
    }
  }
  return out;
}

Manifest write_corpus(const std::filesystem::path& dir, const SynthConfig& cfg,
                      const CorpusPlan& plan) {
  const auto scenarios = plan_corpus(cfg, plan);
  const RegionSpec region = synth_region(cfg);
  const GridSpec spec = synth_grid_spec(cfg);
  const Footprint fp = synth_footprint(cfg);
  std::filesystem::create_directories(dir);
  save_region(region, dir / "region.json");
  fp.write(dir / "footprint.cstc");

  Manifest m;
  m.region = region.name;
  m.n = cfg.n;
  m.olu_count = static_cast<std::size_t>(cfg.k_olus);
  m.base_dir = dir;
  std::set<double> levels;
  std::map<double, std::map<std::string, std::size_t>> counts;
  for (const auto& sp : plan.splits) {
    auto& files = m.splits[sp.name];
    for (const auto& sc : scenarios.at(sp.name)) {
      const std::string rel = "samples/" + sp.name + "/" + encode_scenario(sc) + ".cstc";
      write_sample(dir / rel, generate(sc, cfg, fp), region.name, spec);
      files.push_back(rel);
      levels.insert(sc.slr_m());
      counts[sc.slr_m()][sp.name]++;
    }
  }
  m.slr_levels.assign(levels.begin(), levels.end());
  for (const auto& [slr, per_split] : counts) {
    nlohmann::json row = {{"region", region.name}, {"slr", slr}};
    std::size_t total = 0;
    for (const auto& sp : plan.splits) {
      const auto it = per_split.find(sp.name);
      const std::size_t c = it == per_split.end() ? 0 : it->second;
      row[sp.name] = c;
      total += c;
    }
    row["total"] = total;
    m.table.push_back(row);
  }
  m.write(dir / "manifest.json");
  return m;
}

void write_synth_tables(const std::filesystem::path& dir, const SynthConfig& cfg,
                        const std::vector<ProtectionScenario>& scenarios) {
  std::filesystem::create_directories(dir);
  save_region(synth_region(cfg), dir / "region.json");
  for (const auto& sc : scenarios) {
    write_inundation_csv(dir / (encode_scenario(sc) + ".csv"), synth_table(sc, cfg));
  }
}

}  // namespace coastsurr
