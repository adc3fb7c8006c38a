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
#include "coastsurr/training/checkpoint.hpp"

#include <fstream>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"

namespace coastsurr {

namespace fs = std::filesystem;
using nlohmann::json;

void save_checkpoint(const fs::path& dir, const nn::Network<float>& net, const json& extra,
                     const TrainResult* result) {
  fs::create_directories(dir);
  json cfg = extra.is_object() ? extra : json::object();
  cfg["format_version"] = 1;
  cfg["model"] = net.config().to_json();
  cfg["parameter_count"] = net.parameter_count();
  if (result) {
    cfg["best_epoch"] = result->best_epoch;
    cfg["best_val_loss"] = result->best_val_loss;
    cfg["epochs_run"] = result->history.size();
    cfg["stopped_early"] = result->stopped_early;
  }
  nn::params_to_container(net.config(), net.params()).write(dir / "params.cstc");
  write_text_file(dir / "config.json", cfg.dump(2) + "\n");
  if (result) write_text_file(dir / "history.csv", history_csv(result->history));
}

json read_checkpoint_config(const fs::path& dir) {
  const auto path = dir / "config.json";
  if (!fs::exists(path)) throw NotFoundError("no checkpoint config at " + path.string());
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nn::Network<float> load_checkpoint(const fs::path& path) {
  if (fs::is_directory(path)) {
    const auto params = path / "params.cstc";
    if (!fs::exists(params)) throw NotFoundError("checkpoint " + path.string() + " has no params.cstc");
    return nn::network_from_container(TensorContainer::read(params));
  }
  if (!fs::exists(path)) throw NotFoundError("checkpoint not found: " + path.string());
  return nn::network_from_container(TensorContainer::read(path));
}

bool is_ensemble_dir(const fs::path& dir) { return fs::exists(dir / "ensemble.json"); }

void write_ensemble_index(const fs::path& dir, const std::vector<std::uint64_t>& seeds) {
  json members = json::array();
  for (std::size_t k = 0; k < seeds.size(); ++k) members.push_back("member_" + std::to_string(k));
  const json j = {{"format_version", 1}, {"members", members}, {"seeds", seeds}};
  fs::create_directories(dir);
  write_text_file(dir / "ensemble.json", j.dump(2) + "\n");
}

std::vector<nn::Network<float>> load_ensemble(const fs::path& dir) {
  const auto path = dir / "ensemble.json";
  if (!fs::exists(path)) throw NotFoundError("no ensemble index at " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::vector<nn::Network<float>> out;
  for (const auto& m : j.at("members")) out.push_back(load_checkpoint(dir / m.get<std::string>()));
  if (out.size() < 2) throw ConfigError("ensemble at " + dir.string() + " has fewer than two members");
  for (const auto& net : out) {
    if (net.config().input_n != out.front().config().input_n) {
      throw ShapeError("ensemble members disagree on grid size");
    }
  }
  return out;
}

void append_jsonl(const fs::path& path, const json& record) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::app | std::ios::binary);
  if (!f) throw IoError("cannot append to " + path.string());
  f << record.dump() << "\n";
}

}  // namespace coastsurr
