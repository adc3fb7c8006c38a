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
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/app/run_config.hpp"
#include "coastsurr/core/types.hpp"

namespace coastsurr::app {

using LogFn = std::function<void(const std::string&)>;

/// Names accepted by run_command, in display order. `serve` is long-running
/// and lives in the server API instead.
const std::vector<std::string>& command_names();

/// Runs one pipeline stage and returns a JSON summary of what it produced.
///
/// Every command accepts "config" (path to a RunConfig file; defaults apply
/// when absent) and "seed" (overrides every seed in the config). The other
/// keys are per command:
///
///   synthgen    output, tables
///   preprocess  input (required), output, n, splits {name: fraction}, utm_zone, southern
///   augment     corpus, split, multiplicity
///   train       corpus, output, epochs, train_split, val_split
///   finetune    corpus, checkpoint, output, epochs
///   ensemble    corpus, output, members, epochs
///   evaluate    preds + truths, or checkpoint + corpus + split; output, baseline
///   infer       checkpoint, corpus, split | scenarios | scenario, output
///   gradcam     checkpoint, corpus, scenario (required), layer, output
///   stats       corpus, output
///
/// Unknown keys are rejected with ConfigError.
nlohmann::json run_command(const std::string& name, const nlohmann::json& options, const LogFn& log = {});

/// Config from options["config"], with options["seed"] applied.
RunConfig config_from_options(const nlohmann::json& options);

/// A .cstc sample file, or every .cstc file below a directory in path order.
std::vector<Sample> load_samples(const std::filesystem::path& path);

}  // namespace coastsurr::app
