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
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/app/run_config.hpp"
#include "coastsurr/metrics/metrics.hpp"
#include "coastsurr/nn/model.hpp"
#include "coastsurr/preprocess/sample_builder.hpp"

namespace coastsurr::app {

/// Immutable model bundle shared by every request handler: one network or an
/// ensemble, plus the region geometry and footprint that turn a protection
/// vector into an input grid.
struct ServedModel {
  std::vector<nn::Network<float>> members;
  RegionSpec region;
  Footprint footprint;
  std::vector<double> slr_levels;
  std::string version;
  std::string source;

  int n() const { return members.front().config().input_n; }
  bool is_ensemble() const noexcept { return members.size() > 1; }

  /// `model_path` is a checkpoint or ensemble directory; `corpus_dir` holds
  /// region.json, footprint.cstc and manifest.json.
  static std::shared_ptr<const ServedModel> load(const std::filesystem::path& model_path,
                                                 const std::filesystem::path& corpus_dir);
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

/// Endpoint logic without the transport, so it can be exercised directly.
///
/// POST /predict request:
///   {"scenario": "0101..." or "0101..._1.5", "slr_m": 1.5,
///    "uncertainty": false, "gradcam": false or "fr4",
///    "reference": <RLE grid>}
/// Response:
///   {"scenario", "n", "prediction": <RLE>, "std": <RLE>, "heatmap": <RLE>,
///    "model_version", "members", "inference_ms", "extrapolated",
///    "summary": {"flooded_cells", "max_pwl_m", "dsc"}}
/// Errors are {"error": message, "field": name} with a 4xx status, or 500
/// when the model itself fails.
class PredictService {
 public:
  explicit PredictService(std::shared_ptr<const ServedModel> model, MetricsConfig metrics = {});

  HttpReply health() const;
  HttpReply region() const;
  HttpReply predict(const std::string& body) const;

  const ServedModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const ServedModel> model_;
  MetricsConfig metrics_;
};

/// COASTSURR_PORT when set and valid, otherwise `fallback`.
int port_from_env(int fallback);

/// HTTP front end over PredictService. start() binds and serves on a
/// background thread; port 0 binds any free port.
class Server {
 public:
  Server(std::shared_ptr<const ServedModel> model, ServeConfig cfg, MetricsConfig metrics = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Returns the bound port. Throws IoError when binding fails.
  int start();
  int port() const noexcept;
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coastsurr::app
