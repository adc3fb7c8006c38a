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
#include <vector>

#include <json.hpp>

#include "coastsurr/nn/model.hpp"
#include "coastsurr/training/trainer.hpp"

namespace coastsurr {

// Checkpoint directory:
//   config.json      {"format_version": 1, "model": {...}, ...extra}
//   params.cstc      float32 parameters
//   history.csv      per-epoch losses (when a training result is given)
//
// Ensemble directory:
//   ensemble.json    {"format_version": 1, "members": ["member_0", ...], "seeds": [...]}
//   member_<k>/      one checkpoint directory per member
void save_checkpoint(const std::filesystem::path& dir, const nn::Network<float>& net,
                     const nlohmann::json& extra = nlohmann::json::object(), const TrainResult* result = nullptr);

/// Accepts a checkpoint directory or a bare params container file.
nn::Network<float> load_checkpoint(const std::filesystem::path& path);
nlohmann::json read_checkpoint_config(const std::filesystem::path& dir);

bool is_ensemble_dir(const std::filesystem::path& dir);
void write_ensemble_index(const std::filesystem::path& dir, const std::vector<std::uint64_t>& seeds);
std::vector<nn::Network<float>> load_ensemble(const std::filesystem::path& dir);

void append_jsonl(const std::filesystem::path& path, const nlohmann::json& record);

}  // namespace coastsurr
