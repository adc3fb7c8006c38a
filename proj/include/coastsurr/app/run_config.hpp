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
#include <string>

#include <json.hpp>

#include "coastsurr/augment/augment.hpp"
#include "coastsurr/loss/loss.hpp"
#include "coastsurr/metrics/metrics.hpp"
#include "coastsurr/nn/model.hpp"
#include "coastsurr/synth/synthgen.hpp"
#include "coastsurr/training/ensemble.hpp"
#include "coastsurr/training/trainer.hpp"

namespace coastsurr::app {

/// Output locations; relative entries resolve against the config file's
/// directory.
struct RunPaths {
  std::filesystem::path corpus = "corpus";
  std::filesystem::path checkpoint = "checkpoints/primary";
  std::filesystem::path finetuned = "checkpoints/finetuned";
  std::filesystem::path ensemble = "checkpoints/ensemble";
  std::filesystem::path reports = "reports";
};

struct FinetuneConfig {
  TrainConfig train;
  CurriculumConfig curriculum;
  std::string new_split = "finetune";
  std::string replay_split = "train";
  std::string val_split = "finetune_val";
};

struct ServeConfig {
  std::string host = "127.0.0.1";
  /// 0 binds any free port. COASTSURR_PORT overrides when set.
  int port = 8080;
  int threads = 4;
};

/// One declarative file driving every pipeline stage. Unknown keys anywhere
/// are rejected; absent keys keep their defaults.
struct RunConfig {
  std::string name = "run";
  RunPaths paths;
  SynthConfig synth;
  CorpusPlan corpus;
  bool augment_enabled = false;
  AugmentConfig augment;
  nn::ModelConfig model;
  LossConfig loss;
  TrainConfig train;
  FinetuneConfig finetune;
  EnsembleConfig ensemble;
  MetricsConfig metrics;
  ServeConfig serve;
  std::filesystem::path base_dir = ".";

  RunConfig();
  void validate() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
  static RunConfig load(const std::filesystem::path& path);
};

nlohmann::json synth_config_to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json augment_config_to_json(const AugmentConfig& c);
AugmentConfig augment_config_from_json(const nlohmann::json& j);
nlohmann::json corpus_plan_to_json(const CorpusPlan& p);
CorpusPlan corpus_plan_from_json(const nlohmann::json& j);

}  // namespace coastsurr::app
