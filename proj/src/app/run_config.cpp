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
#include "coastsurr/app/run_config.hpp"

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"

namespace coastsurr::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
void each_key(const json& j, const std::string& where, F&& handle) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (!handle(key, v)) throw ConfigError("unknown key '" + where + "." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError(where + "." + key + ": " + e.what());
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.find(where) != std::string::npos) throw;
      throw ConfigError(where + "." + key + ": " + msg);
    }
  }
}

}  // namespace

json synth_config_to_json(const SynthConfig& c) {
  return {{"n", c.n},
          {"k_olus", c.k_olus},
          {"decay_cells", c.decay_cells},
          {"slr_gain", c.slr_gain},
          {"leak", c.leak},
          {"noise_sd", c.noise_sd},
          {"dry_cut", c.dry_cut},
          {"footprint_cols", c.footprint_cols},
          {"origin_lat", c.origin_lat},
          {"origin_lon", c.origin_lon},
          {"cell_deg", c.cell_deg},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  each_key(j, "synth", [&](const std::string& k, const json& v) {
    if (k == "n") c.n = v.get<int>();
    else if (k == "k_olus") c.k_olus = v.get<int>();
    else if (k == "decay_cells") c.decay_cells = v.get<double>();
    else if (k == "slr_gain") c.slr_gain = v.get<double>();
    else if (k == "leak") c.leak = v.get<double>();
    else if (k == "noise_sd") c.noise_sd = v.get<double>();
    else if (k == "dry_cut") c.dry_cut = v.get<double>();
    else if (k == "footprint_cols") c.footprint_cols = v.get<int>();
    else if (k == "origin_lat") c.origin_lat = v.get<double>();
    else if (k == "origin_lon") c.origin_lon = v.get<double>();
    else if (k == "cell_deg") c.cell_deg = v.get<double>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else return false;
    return true;
  });
  c.validate();
  return c;
}

json augment_config_to_json(const AugmentConfig& c) {
  return {{"multiplicity", c.multiplicity}, {"cutout_size", c.cutout_size},
          {"segment_fraction", c.segment_fraction}, {"scale_lo", c.scale_lo},
          {"scale_hi", c.scale_hi}, {"seed", c.seed}};
}

AugmentConfig augment_config_from_json(const json& j) {
  AugmentConfig c;
  each_key(j, "augment", [&](const std::string& k, const json& v) {
    if (k == "multiplicity") c.multiplicity = v.get<int>();
    else if (k == "cutout_size") c.cutout_size = v.get<int>();
    else if (k == "segment_fraction") c.segment_fraction = v.get<double>();
    else if (k == "scale_lo") c.scale_lo = v.get<double>();
    else if (k == "scale_hi") c.scale_hi = v.get<double>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else return false;
    return true;
  });
  c.validate();
  return c;
}

json corpus_plan_to_json(const CorpusPlan& p) {
  json splits = json::array();
  for (const auto& s : p.splits) {
    json e = {{"name", s.name}, {"count", s.count}};
    if (!s.slr_levels.empty()) e["slr_levels"] = s.slr_levels;
    splits.push_back(e);
  }
  return {{"slr_levels", p.slr_levels}, {"splits", splits}, {"seed", p.seed}};
}

CorpusPlan corpus_plan_from_json(const json& j) {
  CorpusPlan p;
  each_key(j, "corpus", [&](const std::string& k, const json& v) {
    if (k == "slr_levels") {
      p.slr_levels = v.get<std::vector<double>>();
    } else if (k == "seed") {
      p.seed = v.get<std::uint64_t>();
    } else if (k == "splits") {
      if (!v.is_array()) throw ConfigError("corpus.splits must be an array");
      p.splits.clear();
      for (const auto& e : v) {
        SplitPlan s;
        each_key(e, "corpus.splits[]", [&](const std::string& sk, const json& sv) {
          if (sk == "name") s.name = sv.get<std::string>();
          else if (sk == "count") s.count = sv.get<std::size_t>();
          else if (sk == "slr_levels") s.slr_levels = sv.get<std::vector<double>>();
          else return false;
          return true;
        });
        if (s.name.empty()) throw ConfigError("corpus.splits[] entries need a name");
        p.splits.push_back(s);
      }
    } else {
      return false;
    }
    return true;
  });
  if (p.slr_levels.empty()) throw ConfigError("corpus.slr_levels must not be empty");
  return p;
}

RunConfig::RunConfig() {
  finetune.train.epochs = 100;
  corpus.splits = {{"train", 80, {}}, {"val", 10, {}}, {"test", 20, {}}, {"holdout", 20, {}}};
}

void RunConfig::validate() const {
  synth.validate();
  if (augment_enabled) augment.validate();
  model.validate();
  loss.validate();
  train.validate();
  finetune.train.validate();
  finetune.curriculum.validate();
  ensemble.validate();
  if (model.input_n != synth.n) {
    throw ConfigError("model.input_n (" + std::to_string(model.input_n) + ") must equal synth.n (" +
                      std::to_string(synth.n) + ")");
  }
  if (serve.port < 0 || serve.port > 65535) throw ConfigError("serve.port must lie in 0..65535");
  if (serve.threads < 1) throw ConfigError("serve.threads must be positive");
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }

json RunConfig::to_json() const {
  return {{"name", name},
          {"paths",
           {{"corpus", paths.corpus.string()},
            {"checkpoint", paths.checkpoint.string()},
            {"finetuned", paths.finetuned.string()},
            {"ensemble", paths.ensemble.string()},
            {"reports", paths.reports.string()}}},
          {"synth", synth_config_to_json(synth)},
          {"corpus", corpus_plan_to_json(corpus)},
          {"augment", [&] {
             json a = augment_config_to_json(augment);
             a["enabled"] = augment_enabled;
             return a;
           }()},
          {"model", model.to_json()},
          {"loss", loss.to_json()},
          {"train", train.to_json()},
          {"finetune",
           {{"train", finetune.train.to_json()},
            {"curriculum", finetune.curriculum.to_json()},
            {"new_split", finetune.new_split},
            {"replay_split", finetune.replay_split},
            {"val_split", finetune.val_split}}},
          {"ensemble", ensemble.to_json()},
          {"metrics",
           {{"zero_tol", metrics.zero_tol},
            {"delta_high", metrics.delta_high},
            {"delta_low", metrics.delta_low},
            {"acc0_literal", metrics.acc0_literal}}},
          {"serve", {{"host", serve.host}, {"port", serve.port}, {"threads", serve.threads}}}};
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  bool cutout_given = false;
  each_key(j, "config", [&](const std::string& k, const json& v) {
    if (k == "name") {
      c.name = v.get<std::string>();
    } else if (k == "paths") {
      each_key(v, "paths", [&](const std::string& pk, const json& pv) {
        const fs::path p = pv.get<std::string>();
        if (pk == "corpus") c.paths.corpus = p;
        else if (pk == "checkpoint") c.paths.checkpoint = p;
        else if (pk == "finetuned") c.paths.finetuned = p;
        else if (pk == "ensemble") c.paths.ensemble = p;
        else if (pk == "reports") c.paths.reports = p;
        else return false;
        return true;
      });
    } else if (k == "synth") {
      c.synth = synth_config_from_json(v);
    } else if (k == "corpus") {
      c.corpus = corpus_plan_from_json(v);
    } else if (k == "augment") {
      json rest = v;
      if (rest.is_object() && rest.contains("enabled")) {
        c.augment_enabled = rest["enabled"].get<bool>();
        rest.erase("enabled");
      }
      cutout_given = rest.is_object() && rest.contains("cutout_size");
      c.augment = augment_config_from_json(rest);
    } else if (k == "model") {
      c.model = nn::ModelConfig::from_json(v);
    } else if (k == "loss") {
      c.loss = LossConfig::from_json(v);
    } else if (k == "train") {
      c.train = TrainConfig::from_json(v);
    } else if (k == "finetune") {
      each_key(v, "finetune", [&](const std::string& fk, const json& fv) {
        if (fk == "train") c.finetune.train = TrainConfig::from_json(fv);
        else if (fk == "curriculum") c.finetune.curriculum = CurriculumConfig::from_json(fv);
        else if (fk == "new_split") c.finetune.new_split = fv.get<std::string>();
        else if (fk == "replay_split") c.finetune.replay_split = fv.get<std::string>();
        else if (fk == "val_split") c.finetune.val_split = fv.get<std::string>();
        else return false;
        return true;
      });
    } else if (k == "ensemble") {
      c.ensemble = EnsembleConfig::from_json(v);
    } else if (k == "metrics") {
      each_key(v, "metrics", [&](const std::string& mk, const json& mv) {
        if (mk == "zero_tol") c.metrics.zero_tol = mv.get<double>();
        else if (mk == "delta_high") c.metrics.delta_high = mv.get<double>();
        else if (mk == "delta_low") c.metrics.delta_low = mv.get<double>();
        else if (mk == "acc0_literal") c.metrics.acc0_literal = mv.get<bool>();
        else return false;
        return true;
      });
    } else if (k == "serve") {
      each_key(v, "serve", [&](const std::string& sk, const json& sv) {
        if (sk == "host") c.serve.host = sv.get<std::string>();
        else if (sk == "port") c.serve.port = sv.get<int>();
        else if (sk == "threads") c.serve.threads = sv.get<int>();
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  if (!cutout_given) c.augment.cutout_size = default_cutout_size(c.synth.n);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

}  // namespace coastsurr::app
