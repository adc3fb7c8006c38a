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
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "coastsurr/training/trainer.hpp"

namespace coastsurr {

struct EnsembleConfig {
  int members = 5;
  /// One seed per member; empty means base_seed + 1000 * k.
  std::vector<std::uint64_t> seeds;

  void validate() const;
  std::vector<std::uint64_t> resolved_seeds(std::uint64_t base_seed) const;
  nlohmann::json to_json() const;
  static EnsembleConfig from_json(const nlohmann::json& j);
};

struct EnsembleMember {
  nn::Network<float> net;
  TrainResult result;
  std::uint64_t seed = 0;
};

using MemberCallback = std::function<void(int member, const EpochRecord&)>;

/// Independently initialized and trained members; member k depends only on
/// its own seed.
std::vector<EnsembleMember> train_ensemble(const nn::ModelConfig& model, std::span<const Sample> train_set,
                                           std::span<const Sample> val_set, const LossConfig& loss,
                                           const TrainConfig& train_cfg, const EnsembleConfig& cfg,
                                           const MemberCallback& on_epoch = {});

struct Uncertainty {
  Grid mean;
  /// Population standard deviation across members.
  Grid stddev;
};

/// Element-wise statistics of member predictions (at least two).
Uncertainty ensemble_stats(std::span<const Grid> member_predictions);

Uncertainty predict_with_uncertainty(std::span<const nn::Network<float>> members, const Grid& input, double slr_m);

}  // namespace coastsurr
