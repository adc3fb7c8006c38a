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
// coastsurr command-line tool. Every command maps its flags onto the JSON
// options of cs_run_command and prints the JSON summary on stdout.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coastsurr/coastsurr.h"

using nlohmann::json;

namespace {

enum class Kind { kString, kInt, kFlag };

struct FlagSpec {
  const char* flag;
  const char* key;
  Kind kind;
  const char* help;
};

struct Command {
  const char* name;
  const char* help;
  std::vector<FlagSpec> flags;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"synthgen",
       "Generate a synthetic corpus",
       {{"--output,-o", "output", Kind::kString, "corpus directory"},
        {"--tables", "tables", Kind::kString, "also write simulator-style CSV tables here"}}},
      {"preprocess",
       "Rasterize simulator CSV tables into a corpus",
       {{"--input,-i", "input", Kind::kString, "directory with region.json and *.csv tables"},
        {"--output,-o", "output", Kind::kString, "corpus directory"},
        {"--n", "n", Kind::kInt, "grid size"},
        {"--utm-zone", "utm_zone", Kind::kInt, "tables use UTM coordinates in this zone"},
        {"--southern", "southern", Kind::kFlag, "UTM zone is in the southern hemisphere"}}},
      {"augment",
       "Write random-remove variants of a split",
       {{"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--split", "split", Kind::kString, "source split"},
        {"--multiplicity", "multiplicity", Kind::kInt, "variants per sample, original included"}}},
      {"train",
       "Train the primary model",
       {{"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--output,-o", "output", Kind::kString, "checkpoint directory"},
        {"--epochs", "epochs", Kind::kInt, "epoch budget"},
        {"--train-split", "train_split", Kind::kString, "training split"},
        {"--val-split", "val_split", Kind::kString, "validation split"}}},
      {"finetune",
       "Curriculum fine-tuning on new data",
       {{"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--checkpoint", "checkpoint", Kind::kString, "base checkpoint"},
        {"--output,-o", "output", Kind::kString, "fine-tuned checkpoint directory"},
        {"--epochs", "epochs", Kind::kInt, "epoch budget"}}},
      {"ensemble",
       "Train independently seeded members",
       {{"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--output,-o", "output", Kind::kString, "ensemble directory"},
        {"--members", "members", Kind::kInt, "member count"},
        {"--epochs", "epochs", Kind::kInt, "epoch budget per member"}}},
      {"evaluate",
       "Metrics report for predictions against truths",
       {{"--preds", "preds", Kind::kString, "prediction container or directory"},
        {"--truths", "truths", Kind::kString, "truth container or directory"},
        {"--checkpoint", "checkpoint", Kind::kString, "checkpoint or ensemble to evaluate"},
        {"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--split", "split", Kind::kString, "split to evaluate"},
        {"--output,-o", "output", Kind::kString, "report JSON path; the CSV lands beside it"},
        {"--baseline", "baseline", Kind::kFlag, "include the constant-mean baseline"}}},
      {"infer",
       "Predict flood grids for scenarios",
       {{"--checkpoint", "checkpoint", Kind::kString, "checkpoint or ensemble"},
        {"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--split", "split", Kind::kString, "predict every scenario of this split"},
        {"--scenarios", "scenarios", Kind::kString, "file with one scenario per line"},
        {"--scenario", "scenario", Kind::kString, "a single scenario such as 0101_1.5"},
        {"--output,-o", "output", Kind::kString, "prediction directory"}}},
      {"gradcam",
       "Attribution heatmap for one scenario",
       {{"--checkpoint", "checkpoint", Kind::kString, "checkpoint"},
        {"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--scenario", "scenario", Kind::kString, "scenario such as 0101_1.5"},
        {"--layer", "layer", Kind::kString, "layer name (enc1.., marx1.., fr1..)"},
        {"--output,-o", "output", Kind::kString, "heatmap container path"}}},
      {"stats",
       "Corpus statistics",
       {{"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--output,-o", "output", Kind::kString, "write the statistics JSON here"}}},
      {"serve",
       "Serve /predict, /region and /health over HTTP",
       {{"--checkpoint", "checkpoint", Kind::kString, "checkpoint or ensemble directory"},
        {"--corpus", "corpus", Kind::kString, "corpus directory"},
        {"--host", "host", Kind::kString, "bind address"},
        {"--port", "port", Kind::kInt, "port; 0 picks a free one (default: COASTSURR_PORT or config)"},
        {"--threads", "threads", Kind::kInt, "request handler threads"}}},
  };
  return list;
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void log_line(const char* line, void* user) {
  if (user == nullptr) std::fprintf(stderr, "%s\n", line);
}

int report_failure(cs_status s) {
  std::fprintf(stderr, "error (%s): %s\n", cs_status_name(s), cs_last_error());
  return cs_status_exit_code(s);
}

int run_serve(const json& options) {
  cs_server* server = nullptr;
  const cs_status s = cs_server_start_from_options(options.dump().c_str(), &server);
  if (s != CS_OK) return report_failure(s);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("{\"status\": \"serving\", \"port\": %d}\n", cs_server_port(server));
  std::fflush(stdout);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  cs_server_stop(server);
  cs_server_wait(server);
  cs_server_free(server);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coastsurr: coastal flood surrogate toolkit"};
  app.set_version_flag("--version", std::string(cs_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  std::optional<unsigned long long> seed;
  bool quiet = false;
  app.add_option("--config,-c", config, "run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override every seed in the configuration");
  app.add_flag("--quiet,-q", quiet, "suppress progress lines on stderr");

  std::map<std::string, std::map<std::string, std::string>> strings;
  std::map<std::string, std::map<std::string, int>> ints;
  std::map<std::string, std::map<std::string, bool>> flags;
  std::map<std::string, std::vector<std::string>> splits;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;

  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    subs[c.name] = sub;
    for (const auto& f : c.flags) {
      CLI::Option* o = nullptr;
      switch (f.kind) {
        case Kind::kString: o = sub->add_option(f.flag, strings[c.name][f.key], f.help); break;
        case Kind::kInt: o = sub->add_option(f.flag, ints[c.name][f.key], f.help); break;
        case Kind::kFlag: o = sub->add_flag(f.flag, flags[c.name][f.key], f.help); break;
      }
      opts[c.name][f.key] = o;
    }
    if (std::string(c.name) == "preprocess") {
      opts[c.name]["splits"] =
          sub->add_option("--split", splits[c.name], "split assignment as name=fraction, repeatable");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& c : commands()) {
    if (!subs[c.name]->parsed()) continue;
    json options = json::object();
    if (!config.empty()) options["config"] = config;
    if (seed) options["seed"] = *seed;
    for (const auto& f : c.flags) {
      if (opts[c.name][f.key]->count() == 0) continue;
      switch (f.kind) {
        case Kind::kString: options[f.key] = strings[c.name][f.key]; break;
        case Kind::kInt: options[f.key] = ints[c.name][f.key]; break;
        case Kind::kFlag: options[f.key] = flags[c.name][f.key]; break;
      }
    }
    if (opts[c.name].count("splits") && opts[c.name]["splits"]->count() > 0) {
      json fr = json::object();
      for (const auto& s : splits[c.name]) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::fprintf(stderr, "error: --split expects name=fraction, got '%s'\n", s.c_str());
          return 1;
        }
        try {
          fr[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
          std::fprintf(stderr, "error: bad fraction in --split '%s'\n", s.c_str());
          return 1;
        }
      }
      options["splits"] = fr;
    }

    if (std::string(c.name) == "serve") {
      if (seed) options.erase("seed");
      return run_serve(options);
    }
    char* result = nullptr;
    const cs_status s =
        cs_run_command(c.name, options.dump().c_str(), log_line, quiet ? &quiet : nullptr, &result);
    if (s != CS_OK) return report_failure(s);
    std::printf("%s\n", result);
    cs_free_string(result);
    return 0;
  }
  return 1;
}
