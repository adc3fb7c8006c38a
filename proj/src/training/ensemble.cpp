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
#include "coastsurr/training/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {

using nlohmann::json;

void EnsembleConfig::validate() const {
  if (members < 2) throw ConfigError("ensemble.members must be at least 2");
  if (!seeds.empty()) {
    if (static_cast<int>(seeds.size()) != members) {
      throw ConfigError("ensemble.seeds has " + std::to_string(seeds.size()) + " entries for " +
                        std::to_string(members) + " members");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw ConfigError("ensemble.seeds contains duplicates");
    }
  }
}

std::vector<std::uint64_t> EnsembleConfig::resolved_seeds(std::uint64_t base_seed) const {
  validate();
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int k = 0; k < members; ++k) out.push_back(base_seed + 1000ULL * static_cast<std::uint64_t>(k));
  return out;
}

json EnsembleConfig::to_json() const { return {{"members", members}, {"seeds", seeds}}; }

EnsembleConfig EnsembleConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("ensemble config must be a JSON object");
  EnsembleConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "members") c.members = v.get<int>();
      else if (key == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
      else throw ConfigError("unknown key 'ensemble." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("ensemble." + key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

std::vector<EnsembleMember> train_ensemble(const nn::ModelConfig& model, std::span<const Sample> train_set,
                                           std::span<const Sample> val_set, const LossConfig& loss,
                                           const TrainConfig& train_cfg, const EnsembleConfig& cfg,
                                           const MemberCallback& on_epoch) {
  const auto seeds = cfg.resolved_seeds(train_cfg.seed);
  std::vector<EnsembleMember> out;
  for (int k = 0; k < static_cast<int>(seeds.size()); ++k) {
    TrainConfig tc = train_cfg;
    tc.seed = seeds[k];
    nn::Network<float> net(model, seeds[k]);
    EpochCallback cb;
    if (on_epoch) cb = [&, k](const EpochRecord& r) { on_epoch(k, r); };
    auto result = train(net, train_set, val_set, loss, tc, cb);
    out.push_back(EnsembleMember{std::move(net), std::move(result), seeds[k]});
  }
  return out;
}

Uncertainty ensemble_stats(std::span<const Grid> preds) {
  if (preds.size() < 2) throw Error("uncertainty needs at least two ensemble members");
  const int n = preds[0].n();
  for (const auto& p : preds) {
    if (p.n() != n) throw ShapeError("ensemble members disagree on grid size");
  }
  Uncertainty u{Grid(n), Grid(n)};
  const double m = static_cast<double>(preds.size());
  for (std::size_t k = 0; k < u.mean.size(); ++k) {
    double s = 0.0;
    for (const auto& p : preds) s += p.values()[k];
    const double mean = s / m;
    double ss = 0.0;
    for (const auto& p : preds) {
      const double d = p.values()[k] - mean;
      ss += d * d;
    }
    u.mean.storage()[k] = static_cast<float>(mean);
    u.stddev.storage()[k] = static_cast<float>(std::sqrt(ss / m));
  }
  return u;
}

Uncertainty predict_with_uncertainty(std::span<const nn::Network<float>> members, const Grid& input, double slr_m) {
  std::vector<Grid> preds;
  for (const auto& net : members) preds.push_back(predict_grid(net, input, slr_m));
  return ensemble_stats(preds);
}

}  // namespace coastsurr
