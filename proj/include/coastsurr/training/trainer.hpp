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
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/core/types.hpp"
#include "coastsurr/loss/loss.hpp"
#include "coastsurr/nn/model.hpp"
#include "coastsurr/training/optimizer.hpp"

namespace coastsurr {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 2;
  AdamConfig adam;
  /// Epochs without a validation improvement before stopping; 0 disables.
  int early_stop_patience = 20;
  std::uint64_t seed = 0;
  std::string checkpoint_dir;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Share of new data per batch slot: linear from start_new_frac at the first
/// epoch to end_new_frac at the last.
struct CurriculumConfig {
  double start_new_frac = 0.3;
  double end_new_frac = 0.7;
  /// Samples drawn per epoch; 0 means twice the new-data count.
  int samples_per_epoch = 0;

  void validate() const;
  double fraction(int epoch, int epochs) const;
  nlohmann::json to_json() const;
  static CurriculumConfig from_json(const nlohmann::json& j);
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_amae = 0.0;
  double mean_delta = 0.0;
  double new_fraction = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minibatch training with early stopping on validation loss. On return the
/// network holds the best-validation parameters. Without a validation set
/// the training loss drives selection.
TrainResult train(nn::Network<float>& net, std::span<const Sample> train_set, std::span<const Sample> val_set,
                  const LossConfig& loss, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Curriculum fine-tuning: every batch slot holds new data with probability
/// fraction(e), otherwise replayed old data.
TrainResult finetune(nn::Network<float>& net, std::span<const Sample> new_set, std::span<const Sample> old_set,
                     std::span<const Sample> val_set, const LossConfig& loss, const TrainConfig& cfg,
                     const CurriculumConfig& curriculum, const EpochCallback& on_epoch = {});

/// Per-batch draw from the curriculum for one epoch: true marks a new-data
/// slot. Exposed for tests.
std::vector<bool> curriculum_slots(int epoch, int epochs, int count, const CurriculumConfig& c, std::uint64_t seed);

/// Mean hybrid loss over batches of the set, and the set AMAE.
std::pair<double, double> validation_loss(const nn::Network<float>& net, std::span<const Sample> set,
                                          const LossConfig& loss, int batch_size);

Grid predict_grid(const nn::Network<float>& net, const Grid& input, double slr_m);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace coastsurr
