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
#include "coastsurr/app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>

#include "coastsurr/augment/augment.hpp"
#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/random.hpp"
#include "coastsurr/core/scenario.hpp"
#include "coastsurr/metrics/metrics.hpp"
#include "coastsurr/preprocess/grid_mapping.hpp"
#include "coastsurr/preprocess/sample_builder.hpp"
#include "coastsurr/synth/synthgen.hpp"
#include "coastsurr/training/checkpoint.hpp"
#include "coastsurr/training/ensemble.hpp"
#include "coastsurr/training/gradcam.hpp"
#include "coastsurr/training/trainer.hpp"

namespace coastsurr::app {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_keys(const std::string& command, const json& options, std::initializer_list<const char*> allowed) {
  if (!options.is_object()) throw ConfigError(command + ": options must be a JSON object");
  for (const auto& [k, v] : options.items()) {
    (void)v;
    if (k == "config" || k == "seed") continue;
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(command + ": unknown option '" + k + "'");
  }
}

template <typename T>
T opt(const json& o, const char* key, T fallback) {
  if (!o.contains(key) || o[key].is_null()) return fallback;
  try {
    return o[key].get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("option '") + key + "': " + e.what());
  }
}

fs::path opt_path(const RunConfig& cfg, const json& o, const char* key, const fs::path& fallback) {
  if (!o.contains(key) || o[key].is_null()) return cfg.resolve(fallback);
  return fs::path(opt<std::string>(o, key, ""));
}

std::string path_string(const fs::path& p) { return p.lexically_normal().string(); }

void emit(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

EpochCallback epoch_logger(const LogFn& log, const std::string& prefix) {
  if (!log) return {};
  return [log, prefix](const EpochRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%sepoch %d train_loss %.6g val_loss %.6g val_amae %.6g delta %.3g new %.2f (%.2fs)",
                  prefix.c_str(), r.epoch, r.train_loss, r.val_loss, r.val_amae, r.mean_delta, r.new_fraction,
                  r.seconds);
    log(buf);
  };
}

Manifest open_corpus(const fs::path& dir) {
  const fs::path m = dir / "manifest.json";
  if (!fs::exists(m)) throw NotFoundError("no corpus manifest at " + m.string() + "; run synthgen or preprocess");
  return Manifest::read(m);
}

std::vector<Sample> require_split(const Manifest& m, const std::string& split) {
  if (!m.has_split(split)) throw NotFoundError("corpus has no split '" + split + "'");
  auto s = m.load_split(split);
  if (s.empty()) throw ConfigError("split '" + split + "' is empty");
  return s;
}

void require_checkpoint(const fs::path& p) {
  if (!fs::exists(p)) throw NotFoundError("checkpoint not found: " + p.string());
}

std::vector<Grid> outputs(const std::vector<Sample>& s) {
  std::vector<Grid> g;
  g.reserve(s.size());
  for (const auto& x : s) g.push_back(x.output);
  return g;
}

json split_counts(const Manifest& m) {
  json c = json::object();
  for (const auto& [name, files] : m.splits) c[name] = files.size();
  return c;
}

json cmd_synthgen(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("synthgen", o, {"output", "tables"});
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.corpus);
  const auto t0 = Clock::now();
  const Manifest m = write_corpus(out, cfg.synth, cfg.corpus);
  json r = {{"corpus", path_string(out)}, {"splits", split_counts(m)}, {"slr_levels", m.slr_levels}};
  if (o.contains("tables")) {
    const fs::path tables = opt<std::string>(o, "tables", "");
    std::vector<ProtectionScenario> all;
    for (const auto& [name, list] : plan_corpus(cfg.synth, cfg.corpus)) {
      (void)name;
      all.insert(all.end(), list.begin(), list.end());
    }
    write_synth_tables(tables, cfg.synth, all);
    r["tables"] = path_string(tables);
    r["table_count"] = all.size();
  }
  r["seconds"] = seconds_since(t0);
  emit(log, "synthgen: wrote corpus to " + path_string(out));
  return r;
}

json cmd_preprocess(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("preprocess", o, {"input", "output", "n", "splits", "utm_zone", "southern"});
  if (!o.contains("input")) throw ConfigError("preprocess: 'input' (directory of CSV tables) is required");
  const fs::path in = opt<std::string>(o, "input", "");
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.corpus);
  const int n = opt<int>(o, "n", cfg.synth.n);
  if (!fs::is_directory(in)) throw NotFoundError("preprocess input is not a directory: " + in.string());
  const RegionSpec region = load_region(in / "region.json");
  geo::CoordinateSystem crs = geo::CoordinateSystem::lat_lon();
  if (o.contains("utm_zone")) crs = geo::CoordinateSystem::utm(opt<int>(o, "utm_zone", 0), !opt<bool>(o, "southern", false));

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw NotFoundError("no .csv tables in " + in.string());
  std::vector<InundationTable> tables;
  tables.reserve(files.size());
  for (const auto& f : files) tables.push_back(read_inundation_csv(f, region.olu_count()));
  const GridSpec spec = build_grid_spec(tables, n);
  std::vector<InundationPoint> all_points;
  std::set<std::pair<double, double>> seen;
  for (const auto& t : tables) {
    for (const auto& pt : t.points) {
      if (seen.emplace(pt.x, pt.y).second) all_points.push_back(pt);
    }
  }
  const Footprint fp = build_footprint(all_points, region, spec, crs);

  std::vector<std::pair<std::string, double>> fractions;
  if (o.contains("splits")) {
    for (const auto& [name, v] : o["splits"].items()) fractions.emplace_back(name, v.get<double>());
  }
  std::vector<std::string> assignment(tables.size(), "all");
  if (!fractions.empty()) {
    double total = 0.0;
    for (const auto& f : fractions) {
      if (!(f.second >= 0.0)) throw ConfigError("preprocess: split fractions must be non-negative");
      total += f.second;
    }
    if (total <= 0.0) throw ConfigError("preprocess: split fractions sum to zero");
    std::vector<std::size_t> order(tables.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    Rng rng(cfg.corpus.seed, 0x5B117ULL);
    rng.shuffle(order);
    std::size_t pos = 0;
    double acc = 0.0;
    for (std::size_t s = 0; s < fractions.size(); ++s) {
      acc += fractions[s].second / total;
      const std::size_t end =
          s + 1 == fractions.size() ? order.size() : static_cast<std::size_t>(std::llround(acc * order.size()));
      for (; pos < end && pos < order.size(); ++pos) assignment[order[pos]] = fractions[s].first;
    }
  }

  fs::create_directories(out);
  save_region(region, out / "region.json");
  fp.write(out / "footprint.cstc");
  Manifest m;
  m.region = region.name;
  m.n = n;
  m.olu_count = region.olu_count();
  m.base_dir = out;
  std::set<double> levels;
  std::map<double, std::map<std::string, std::size_t>> counts;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    Sample s = build_sample(tables[k], region, spec, crs);
    const std::string rel = "samples/" + assignment[k] + "/" + s.scenario_id + ".cstc";
    write_sample(out / rel, s, region.name, spec);
    m.splits[assignment[k]].push_back(rel);
    levels.insert(s.slr_m);
    counts[s.slr_m][assignment[k]]++;
  }
  m.slr_levels.assign(levels.begin(), levels.end());
  for (const auto& [slr, per] : counts) {
    json row = {{"region", region.name}, {"slr", slr}};
    std::size_t total = 0;
    for (const auto& [name, c] : per) {
      row[name] = c;
      total += c;
    }
    row["total"] = total;
    m.table.push_back(row);
  }
  m.write(out / "manifest.json");
  emit(log, "preprocess: " + std::to_string(tables.size()) + " tables -> " + path_string(out));
  return {{"corpus", path_string(out)}, {"splits", split_counts(m)}, {"footprint_cells", fp.size()},
          {"grid", grid_spec_to_json(spec)}};
}

json cmd_augment(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("augment", o, {"corpus", "split", "multiplicity"});
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const std::string split = opt<std::string>(o, "split", "train");
  AugmentConfig a = cfg.augment;
  a.multiplicity = opt<int>(o, "multiplicity", a.multiplicity);
  a.validate();
  Manifest m = open_corpus(dir);
  const auto samples = require_split(m, split);
  const auto expanded = expand_corpus(samples, a);
  const std::string out_split = split + "_aug";
  auto& files = m.splits[out_split];
  files.clear();
  const std::size_t mult = static_cast<std::size_t>(a.multiplicity);
  for (std::size_t k = 0; k < expanded.size(); ++k) {
    const std::string rel = "samples/" + out_split + "/" + expanded[k].scenario_id + "_v" +
                            std::to_string(k % mult) + ".cstc";
    write_sample(dir / rel, expanded[k], m.region);
    files.push_back(rel);
  }
  m.write(dir / "manifest.json");
  emit(log, "augment: " + std::to_string(samples.size()) + " x " + std::to_string(mult) + " = " +
                std::to_string(expanded.size()) + " samples in split " + out_split);
  return {{"split", out_split}, {"source_count", samples.size()}, {"multiplicity", a.multiplicity},
          {"count", expanded.size()}, {"cutout_size", a.cutout_size}};
}

std::vector<Sample> training_set(const RunConfig& cfg, const Manifest& m, const std::string& split) {
  auto s = require_split(m, split);
  if (cfg.augment_enabled && cfg.augment.multiplicity > 1) s = expand_corpus(s, cfg.augment);
  return s;
}

json result_json(const TrainResult& r) {
  json j = {{"epochs_run", r.history.size()}, {"best_epoch", r.best_epoch}, {"best_val_loss", r.best_val_loss},
            {"stopped_early", r.stopped_early}};
  if (!r.history.empty()) {
    j["final_train_loss"] = r.history.back().train_loss;
    j["final_val_amae"] = r.history.back().val_amae;
  }
  return j;
}

json cmd_train(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("train", o, {"corpus", "output", "epochs", "train_split", "val_split"});
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.checkpoint);
  TrainConfig tc = cfg.train;
  tc.epochs = opt<int>(o, "epochs", tc.epochs);
  tc.validate();
  const Manifest m = open_corpus(dir);
  const auto train_set = training_set(cfg, m, opt<std::string>(o, "train_split", "train"));
  const std::string val_split = opt<std::string>(o, "val_split", "val");
  std::vector<Sample> val_set;
  if (m.has_split(val_split)) val_set = m.load_split(val_split);
  if (m.n != cfg.model.input_n) {
    throw ConfigError("corpus n=" + std::to_string(m.n) + " but model.input_n=" + std::to_string(cfg.model.input_n));
  }
  const auto t0 = Clock::now();
  nn::Network<float> net(cfg.model, tc.seed);
  const TrainResult r = train(net, train_set, val_set, cfg.loss, tc, epoch_logger(log, "train: "));
  save_checkpoint(out, net, {{"kind", "primary"}, {"seed", tc.seed}, {"train", tc.to_json()}, {"loss", cfg.loss.to_json()}},
                  &r);
  json j = result_json(r);
  j["checkpoint"] = path_string(out);
  j["parameter_count"] = net.parameter_count();
  j["train_samples"] = train_set.size();
  j["val_samples"] = val_set.size();
  j["seconds"] = seconds_since(t0);
  return j;
}

json cmd_finetune(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("finetune", o, {"corpus", "checkpoint", "output", "epochs"});
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const fs::path ck = opt_path(cfg, o, "checkpoint", cfg.paths.checkpoint);
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.finetuned);
  require_checkpoint(ck);
  TrainConfig tc = cfg.finetune.train;
  tc.epochs = opt<int>(o, "epochs", tc.epochs);
  tc.validate();
  const Manifest m = open_corpus(dir);
  const auto new_set = require_split(m, cfg.finetune.new_split);
  const auto old_set = require_split(m, cfg.finetune.replay_split);
  std::vector<Sample> val_set;
  if (m.has_split(cfg.finetune.val_split)) val_set = m.load_split(cfg.finetune.val_split);
  const auto t0 = Clock::now();
  nn::Network<float> net = load_checkpoint(ck);
  const TrainResult r =
      finetune(net, new_set, old_set, val_set, cfg.loss, tc, cfg.finetune.curriculum, epoch_logger(log, "finetune: "));
  save_checkpoint(out, net,
                  {{"kind", "finetuned"}, {"seed", tc.seed}, {"base", path_string(ck)}, {"train", tc.to_json()},
                   {"curriculum", cfg.finetune.curriculum.to_json()}},
                  &r);
  json j = result_json(r);
  j["checkpoint"] = path_string(out);
  j["new_samples"] = new_set.size();
  j["replay_samples"] = old_set.size();
  j["seconds"] = seconds_since(t0);
  return j;
}

json cmd_ensemble(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("ensemble", o, {"corpus", "output", "members", "epochs"});
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.ensemble);
  EnsembleConfig ec = cfg.ensemble;
  if (o.contains("members")) {
    ec.members = opt<int>(o, "members", ec.members);
    if (!ec.seeds.empty() && static_cast<int>(ec.seeds.size()) != ec.members) ec.seeds.clear();
  }
  ec.validate();
  TrainConfig tc = cfg.train;
  tc.epochs = opt<int>(o, "epochs", tc.epochs);
  tc.validate();
  const Manifest m = open_corpus(dir);
  const auto train_set = training_set(cfg, m, "train");
  std::vector<Sample> val_set;
  if (m.has_split("val")) val_set = m.load_split("val");
  const auto t0 = Clock::now();
  MemberCallback cb;
  if (log) {
    cb = [&log](int member, const EpochRecord& r) {
      epoch_logger(log, "ensemble[" + std::to_string(member) + "]: ")(r);
    };
  }
  const auto members = train_ensemble(cfg.model, train_set, val_set, cfg.loss, tc, ec, cb);
  std::vector<std::uint64_t> seeds;
  json results = json::array();
  for (std::size_t k = 0; k < members.size(); ++k) {
    save_checkpoint(out / ("member_" + std::to_string(k)), members[k].net,
                    {{"kind", "ensemble_member"}, {"seed", members[k].seed}, {"train", tc.to_json()}}, &members[k].result);
    seeds.push_back(members[k].seed);
    json rj = result_json(members[k].result);
    rj["seed"] = members[k].seed;
    results.push_back(rj);
  }
  write_ensemble_index(out, seeds);
  return {{"ensemble", path_string(out)}, {"members", results}, {"seconds", seconds_since(t0)}};
}

std::vector<nn::Network<float>> load_models(const fs::path& p) {
  require_checkpoint(p);
  if (is_ensemble_dir(p)) return load_ensemble(p);
  std::vector<nn::Network<float>> v;
  v.push_back(load_checkpoint(p));
  return v;
}

struct Prediction {
  Grid mean;
  std::optional<Grid> stddev;
};

Prediction predict_with(const std::vector<nn::Network<float>>& models, const Grid& input, double slr) {
  if (models.size() == 1) return {predict_grid(models.front(), input, slr), std::nullopt};
  auto u = predict_with_uncertainty(models, input, slr);
  return {std::move(u.mean), std::move(u.stddev)};
}

void write_report(const MetricsReport& r, const fs::path& json_path, const json& extra) {
  fs::create_directories(json_path.parent_path().empty() ? fs::path(".") : json_path.parent_path());
  json j = r.to_json();
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_text_file(json_path, j.dump(2) + "\n");
  fs::path csv = json_path;
  csv.replace_extension(".csv");
  r.write_csv(csv);
}

json cmd_evaluate(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("evaluate", o, {"preds", "truths", "checkpoint", "corpus", "split", "output", "baseline"});
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.reports / "metrics.json");
  std::vector<Grid> preds;
  std::vector<Grid> truths;
  std::vector<std::string> ids;
  json extra = json::object();
  if (o.contains("preds") || o.contains("truths")) {
    if (!o.contains("preds") || !o.contains("truths")) {
      throw ConfigError("evaluate: 'preds' and 'truths' must be given together");
    }
    const auto p = load_samples(opt<std::string>(o, "preds", ""));
    const auto t = load_samples(opt<std::string>(o, "truths", ""));
    std::map<std::string, const Sample*> by_id;
    for (const auto& s : p) {
      if (!by_id.emplace(s.scenario_id, &s).second) throw ConfigError("duplicate prediction for " + s.scenario_id);
    }
    if (p.size() != t.size()) {
      throw ShapeError("evaluate: " + std::to_string(p.size()) + " predictions for " + std::to_string(t.size()) +
                       " truths");
    }
    for (const auto& s : t) {
      const auto it = by_id.find(s.scenario_id);
      if (it == by_id.end()) throw NotFoundError("no prediction for scenario " + s.scenario_id);
      preds.push_back(it->second->output);
      truths.push_back(s.output);
      ids.push_back(s.scenario_id);
    }
    extra["source"] = "containers";
  } else {
    const fs::path ck = opt_path(cfg, o, "checkpoint", cfg.paths.checkpoint);
    const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
    const std::string split = opt<std::string>(o, "split", "test");
    const auto models = load_models(ck);
    const Manifest m = open_corpus(dir);
    const auto set = require_split(m, split);
    for (const auto& s : set) {
      preds.push_back(predict_with(models, s.input, s.slr_m).mean);
      truths.push_back(s.output);
      ids.push_back(s.scenario_id);
    }
    extra["checkpoint"] = path_string(ck);
    extra["split"] = split;
    if (opt<bool>(o, "baseline", false)) {
      const auto train_set = require_split(m, "train");
      const NaiveBaseline nb = naive_baseline(outputs(train_set));
      std::vector<Grid> base(truths.size(), nb.predict(m.n));
      extra["baseline"] = evaluate(base, truths, cfg.metrics).to_json();
      extra["baseline"]["mean"] = nb.mean;
    }
  }
  const MetricsReport r = evaluate(preds, truths, cfg.metrics, ids);
  for (const auto& w : r.warnings) emit(log, "evaluate: warning: " + w);
  write_report(r, out, extra);
  json j = r.to_json();
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["report"] = path_string(out);
  return j;
}

std::vector<ProtectionScenario> scenarios_from(const json& o, const Manifest& m, std::vector<Sample>* samples) {
  std::vector<ProtectionScenario> out;
  if (o.contains("scenario")) {
    out.push_back(decode_scenario(opt<std::string>(o, "scenario", ""), m.olu_count));
  } else if (o.contains("scenarios")) {
    const fs::path p = opt<std::string>(o, "scenarios", "");
    std::istringstream in(read_text_file(p));
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      out.push_back(decode_scenario(line, m.olu_count));
    }
    if (out.empty()) throw ConfigError("scenario list " + p.string() + " is empty");
  } else {
    *samples = require_split(m, opt<std::string>(o, "split", "test"));
    for (const auto& s : *samples) out.push_back(decode_scenario(s.scenario_id, m.olu_count));
  }
  return out;
}

json cmd_infer(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("infer", o, {"checkpoint", "corpus", "split", "scenarios", "scenario", "output"});
  const fs::path ck = opt_path(cfg, o, "checkpoint", cfg.paths.checkpoint);
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.reports / "predictions");
  const auto models = load_models(ck);
  const Manifest m = open_corpus(dir);
  const Footprint fp = Footprint::read(dir / "footprint.cstc");
  std::vector<Sample> samples;
  const auto scenarios = scenarios_from(o, m, &samples);
  fs::create_directories(out);
  const auto t0 = Clock::now();
  json items = json::array();
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto ts = Clock::now();
    Sample s;
    s.input = samples.empty() ? fp.input_for(scenarios[k]) : samples[k].input;
    s.slr_m = scenarios[k].slr_m();
    s.scenario_id = encode_scenario(scenarios[k]);
    Prediction p = predict_with(models, s.input, s.slr_m);
    s.output = std::move(p.mean);
    TensorContainer c = sample_to_container(s, m.region);
    if (p.stddev) {
      const auto n = static_cast<std::int64_t>(p.stddev->n());
      c.add("std", {n, n}, p.stddev->storage());
    }
    c.write(out / (s.scenario_id + ".cstc"));
    items.push_back({{"scenario", s.scenario_id}, {"ms", seconds_since(ts) * 1e3}});
  }
  const double secs = seconds_since(t0);
  emit(log, "infer: " + std::to_string(scenarios.size()) + " scenarios in " + std::to_string(secs) + " s");
  return {{"count", scenarios.size()}, {"seconds", secs}, {"output", path_string(out)}, {"members", models.size()},
          {"items", items}};
}

json cmd_gradcam(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("gradcam", o, {"checkpoint", "corpus", "scenario", "layer", "output"});
  if (!o.contains("scenario")) throw ConfigError("gradcam: 'scenario' is required");
  const fs::path ck = opt_path(cfg, o, "checkpoint", cfg.paths.checkpoint);
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  require_checkpoint(ck);
  const auto net = is_ensemble_dir(ck) ? load_ensemble(ck).front() : load_checkpoint(ck);
  const Manifest m = open_corpus(dir);
  const Footprint fp = Footprint::read(dir / "footprint.cstc");
  const auto sc = decode_scenario(opt<std::string>(o, "scenario", ""), m.olu_count);
  const std::string id = encode_scenario(sc);
  const fs::path out = opt_path(cfg, o, "output", cfg.paths.reports / ("gradcam_" + id + ".cstc"));
  std::string layer = opt<std::string>(o, "layer", "");
  const auto layers = gradcam_layers(net.config());
  if (layer.empty()) layer = layers.back();
  const Grid input = fp.input_for(sc);
  const Grid heat = grad_cam(net, input, sc.slr_m(), layer);
  TensorContainer c;
  c.metadata = {{"scenario", id}, {"slr_m", sc.slr_m()}, {"layer", layer}};
  const auto n = static_cast<std::int64_t>(heat.n());
  c.add("heatmap", {n, n}, std::vector<float>(heat.values().begin(), heat.values().end()));
  c.add("input", {n, n}, std::vector<float>(input.values().begin(), input.values().end()));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  c.write(out);
  std::size_t hot = 0;
  for (float v : heat.values()) hot += v >= 0.5f;
  emit(log, "gradcam: " + layer + " -> " + path_string(out));
  return {{"scenario", id}, {"layer", layer}, {"output", path_string(out)}, {"cells_ge_half", hot}};
}

json cmd_stats(const RunConfig& cfg, const json& o, const LogFn& log) {
  check_keys("stats", o, {"corpus", "output"});
  const fs::path dir = opt_path(cfg, o, "corpus", cfg.paths.corpus);
  const Manifest m = open_corpus(dir);
  json splits = json::object();
  std::vector<Sample> everything;
  for (const auto& [name, files] : m.splits) {
    auto s = m.load_split(name);
    std::size_t zero = 0, cells = 0, footprint = 0;
    double max_pwl = 0.0;
    for (const auto& x : s) {
      cells += x.output.size();
      footprint += x.input.count_nonzero();
      for (float v : x.output.values()) {
        zero += v == 0.0f;
        max_pwl = std::max(max_pwl, static_cast<double>(v));
      }
    }
    splits[name] = {{"count", s.size()},
                    {"zero_fraction", cells ? static_cast<double>(zero) / cells : 0.0},
                    {"mean_footprint_cells", s.empty() ? 0.0 : static_cast<double>(footprint) / s.size()},
                    {"max_pwl_m", max_pwl}};
    if (name.size() < 4 || name.substr(name.size() - 4) != "_aug") everything.insert(everything.end(), s.begin(), s.end());
  }
  const PwlHistogram h = pwl_histogram(everything);
  json r = {{"region", m.region},
            {"n", m.n},
            {"olu_count", m.olu_count},
            {"slr_levels", m.slr_levels},
            {"table", m.table},
            {"splits", splits},
            {"histogram",
             {{"zero_mass", h.zero_mass}, {"max_pwl", h.max_pwl}, {"edges", h.edges}, {"masses", h.masses},
              {"total_cells", h.total_cells}}}};
  if (o.contains("output")) {
    const fs::path out = opt<std::string>(o, "output", "");
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text_file(out, r.dump(2) + "\n");
    r["output"] = path_string(out);
  }
  emit(log, "stats: " + std::to_string(everything.size()) + " samples");
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"preprocess", "synthgen", "augment",  "train",
                                                 "finetune",   "ensemble", "evaluate", "infer",
                                                 "gradcam",    "stats",    "serve"};
  return names;
}

RunConfig config_from_options(const json& options) {
  RunConfig cfg;
  if (options.is_object() && options.contains("config") && !options["config"].is_null()) {
    const auto& c = options["config"];
    if (c.is_string()) {
      cfg = RunConfig::load(c.get<std::string>());
    } else {
      cfg = RunConfig::from_json(c, fs::current_path());
    }
  } else {
    cfg.base_dir = fs::current_path();
  }
  if (options.is_object() && options.contains("seed") && !options["seed"].is_null()) {
    const auto& sv = options["seed"];
    if (!sv.is_number_integer() || (!sv.is_number_unsigned() && sv.get<long long>() < 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    const auto seed = options["seed"].get<std::uint64_t>();
    cfg.train.seed = seed;
    cfg.finetune.train.seed = seed;
    cfg.synth.seed = seed;
    cfg.corpus.seed = seed;
    cfg.augment.seed = seed;
  }
  return cfg;
}

std::vector<Sample> load_samples(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {read_sample(path)};
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".cstc") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw NotFoundError("no .cstc samples under " + path.string());
  std::vector<Sample> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_sample(f));
  return out;
}

json run_command(const std::string& name, const json& options, const LogFn& log) {
  const json o = options.is_null() ? json::object() : options;
  const RunConfig cfg = config_from_options(o);
  if (name == "synthgen") return cmd_synthgen(cfg, o, log);
  if (name == "preprocess") return cmd_preprocess(cfg, o, log);
  if (name == "augment") return cmd_augment(cfg, o, log);
  if (name == "train") return cmd_train(cfg, o, log);
  if (name == "finetune") return cmd_finetune(cfg, o, log);
  if (name == "ensemble") return cmd_ensemble(cfg, o, log);
  if (name == "evaluate") return cmd_evaluate(cfg, o, log);
  if (name == "infer") return cmd_infer(cfg, o, log);
  if (name == "gradcam") return cmd_gradcam(cfg, o, log);
  if (name == "stats") return cmd_stats(cfg, o, log);
  if (name == "serve") throw ConfigError("serve is long-running; start it through the server API");
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace coastsurr::app
