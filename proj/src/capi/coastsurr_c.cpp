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
#include "coastsurr/coastsurr.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "coastsurr/app/pipeline.hpp"
#include "coastsurr/app/service.hpp"
#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/scenario.hpp"
#include "coastsurr/metrics/metrics.hpp"
#include "coastsurr/training/ensemble.hpp"
#include "coastsurr/training/gradcam.hpp"
#include "coastsurr/training/trainer.hpp"

using nlohmann::json;
namespace cs = coastsurr;

struct cs_model {
  std::shared_ptr<const cs::app::ServedModel> model;
  std::unique_ptr<cs::app::PredictService> service;
};

struct cs_server {
  std::shared_ptr<const cs::app::ServedModel> model;
  std::unique_ptr<cs::app::Server> server;
};

namespace {

thread_local std::string g_last_error;

cs_status fail(cs_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename F>
cs_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CS_OK;
  } catch (const cs::ParseError& e) {
    return fail(CS_ERR_PARSE, e.what());
  } catch (const cs::LengthError& e) {
    return fail(CS_ERR_LENGTH, e.what());
  } catch (const cs::ConfigError& e) {
    return fail(CS_ERR_CONFIG, e.what());
  } catch (const cs::IoError& e) {
    return fail(CS_ERR_IO, e.what());
  } catch (const cs::ShapeError& e) {
    return fail(CS_ERR_SHAPE, e.what());
  } catch (const cs::CapacityError& e) {
    return fail(CS_ERR_CAPACITY, e.what());
  } catch (const cs::NumericError& e) {
    return fail(CS_ERR_NUMERIC, e.what());
  } catch (const cs::NotFoundError& e) {
    return fail(CS_ERR_NOT_FOUND, e.what());
  } catch (const json::parse_error& e) {
    return fail(CS_ERR_PARSE, e.what());
  } catch (const json::exception& e) {
    return fail(CS_ERR_CONFIG, e.what());
  } catch (const cs::Error& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CS_ERR_INTERNAL, "unknown exception");
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw cs::ConfigError(std::string("invalid argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

json parse_options(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  return json::parse(text);
}

void copy_grid(const cs::Grid& g, float* out, size_t len) {
  if (len != g.size()) {
    throw cs::ShapeError("output buffer holds " + std::to_string(len) + " floats, grid needs " +
                         std::to_string(g.size()));
  }
  std::copy(g.values().begin(), g.values().end(), out);
}

cs::ProtectionScenario scenario_of(const cs_model* m, const char* scenario) {
  need(scenario != nullptr, "scenario is NULL");
  return cs::decode_scenario(scenario, m->model->region.olu_count());
}

}  // namespace

extern "C" {

const char* cs_version(void) { return COASTSURR_VERSION_STRING; }

const char* cs_last_error(void) { return g_last_error.c_str(); }

const char* cs_status_name(cs_status s) {
  switch (s) {
    case CS_OK: return "ok";
    case CS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CS_ERR_PARSE: return "parse_error";
    case CS_ERR_LENGTH: return "length_error";
    case CS_ERR_CONFIG: return "config_error";
    case CS_ERR_IO: return "io_error";
    case CS_ERR_SHAPE: return "shape_error";
    case CS_ERR_CAPACITY: return "capacity_error";
    case CS_ERR_NUMERIC: return "numeric_error";
    case CS_ERR_NOT_FOUND: return "not_found";
    case CS_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

int cs_status_exit_code(cs_status s) {
  switch (s) {
    case CS_OK: return 0;
    case CS_ERR_NUMERIC:
    case CS_ERR_INTERNAL: return 2;
    default: return 1;
  }
}

void cs_free_string(char* s) { std::free(s); }

const char* cs_command_names(void) {
  static const std::string joined = [] {
    std::string s;
    for (const auto& n : cs::app::command_names()) s += (s.empty() ? "" : " ") + n;
    return s;
  }();
  return joined.c_str();
}

cs_status cs_run_command(const char* name, const char* options_json, cs_log_fn log, void* user, char** result_json) {
  if (name == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "command name is NULL");
  return guarded([&] {
    cs::app::LogFn fn;
    if (log != nullptr) fn = [log, user](const std::string& line) { log(line.c_str(), user); };
    const json r = cs::app::run_command(name, parse_options(options_json), fn);
    if (result_json != nullptr) *result_json = dup_string(r.dump(2));
  });
}

cs_status cs_model_load(const char* model_path, const char* corpus_dir, cs_model** out) {
  if (model_path == nullptr || corpus_dir == nullptr || out == nullptr) {
    return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_load: NULL argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<cs_model>();
    m->model = cs::app::ServedModel::load(model_path, corpus_dir);
    m->service = std::make_unique<cs::app::PredictService>(m->model);
    *out = m.release();
  });
}

void cs_model_free(cs_model* model) { delete model; }

cs_status cs_model_info(const cs_model* model, char** info_json) {
  if (model == nullptr || info_json == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_info: NULL argument");
  return guarded([&] {
    json j = model->service->region().body;
    j["members"] = model->model->members.size();
    j["model_version"] = model->model->version;
    j["parameter_count"] = model->model->members.front().parameter_count();
    j["source"] = model->model->source;
    *info_json = dup_string(j.dump(2));
  });
}

cs_status cs_model_grid_size(const cs_model* model, int* n) {
  if (model == nullptr || n == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_grid_size: NULL argument");
  *n = model->model->n();
  g_last_error.clear();
  return CS_OK;
}

cs_status cs_model_predict(const cs_model* model, const char* scenario, float* out, size_t out_len) {
  if (model == nullptr || out == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_predict: NULL argument");
  return guarded([&] {
    const auto sc = scenario_of(model, scenario);
    const cs::Grid input = model->model->footprint.input_for(sc);
    const auto& members = model->model->members;
    if (members.size() == 1) {
      copy_grid(cs::predict_grid(members.front(), input, sc.slr_m()), out, out_len);
    } else {
      copy_grid(cs::predict_with_uncertainty(members, input, sc.slr_m()).mean, out, out_len);
    }
  });
}

cs_status cs_model_predict_grid(const cs_model* model, const float* input, double slr_m, float* out,
                                size_t out_len) {
  if (model == nullptr || input == nullptr || out == nullptr) {
    return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_predict_grid: NULL argument");
  }
  return guarded([&] {
    const int n = model->model->n();
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    cs::Grid g(n, std::vector<float>(input, input + cells));
    for (float v : g.values()) {
      if (v != -1.0f && v != 0.0f && v != 1.0f) throw cs::ShapeError("input cells must be -1, 0 or 1");
    }
    const auto& members = model->model->members;
    if (members.size() == 1) {
      copy_grid(cs::predict_grid(members.front(), g, slr_m), out, out_len);
    } else {
      copy_grid(cs::predict_with_uncertainty(members, g, slr_m).mean, out, out_len);
    }
  });
}

cs_status cs_model_uncertainty(const cs_model* model, const char* scenario, float* mean, float* stddev, size_t len) {
  if (model == nullptr || mean == nullptr || stddev == nullptr) {
    return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_uncertainty: NULL argument");
  }
  return guarded([&] {
    if (!model->model->is_ensemble()) throw cs::ConfigError("uncertainty needs an ensemble of two or more members");
    const auto sc = scenario_of(model, scenario);
    const auto u = cs::predict_with_uncertainty(model->model->members, model->model->footprint.input_for(sc), sc.slr_m());
    copy_grid(u.mean, mean, len);
    copy_grid(u.stddev, stddev, len);
  });
}

cs_status cs_model_gradcam(const cs_model* model, const char* scenario, const char* layer, float* out, size_t out_len) {
  if (model == nullptr || out == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_gradcam: NULL argument");
  return guarded([&] {
    const auto sc = scenario_of(model, scenario);
    const cs::Grid heat = cs::grad_cam(model->model->members.front(), model->model->footprint.input_for(sc),
                                       sc.slr_m(), layer == nullptr ? "" : layer);
    copy_grid(heat, out, out_len);
  });
}

cs_status cs_model_request(const cs_model* model, const char* request_json, int* http_status, char** response_json) {
  if (model == nullptr || request_json == nullptr || http_status == nullptr || response_json == nullptr) {
    return fail(CS_ERR_INVALID_ARGUMENT, "cs_model_request: NULL argument");
  }
  return guarded([&] {
    const auto r = model->service->predict(request_json);
    *http_status = r.status;
    *response_json = dup_string(r.body.dump());
  });
}

cs_status cs_evaluate(const float* preds, const float* truths, size_t count, int n, const char* metrics_json,
                      char** report_json) {
  if (preds == nullptr || truths == nullptr || report_json == nullptr || n <= 0 || count == 0) {
    return fail(CS_ERR_INVALID_ARGUMENT, "cs_evaluate: NULL argument, empty set or non-positive n");
  }
  return guarded([&] {
    cs::MetricsConfig cfg;
    const json mj = parse_options(metrics_json);
    for (const auto& [k, v] : mj.items()) {
      if (k == "zero_tol") cfg.zero_tol = v.get<double>();
      else if (k == "delta_high") cfg.delta_high = v.get<double>();
      else if (k == "delta_low") cfg.delta_low = v.get<double>();
      else if (k == "acc0_literal") cfg.acc0_literal = v.get<bool>();
      else throw cs::ConfigError("unknown metrics key '" + k + "'");
    }
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    std::vector<cs::Grid> p, t;
    for (std::size_t k = 0; k < count; ++k) {
      p.emplace_back(n, std::vector<float>(preds + k * cells, preds + (k + 1) * cells));
      t.emplace_back(n, std::vector<float>(truths + k * cells, truths + (k + 1) * cells));
    }
    *report_json = dup_string(cs::evaluate(p, t, cfg).to_json().dump(2));
  });
}

cs_status cs_server_start(const cs_model* model, const char* host, int port, int threads, cs_server** out) {
  if (model == nullptr || out == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_server_start: NULL argument");
  *out = nullptr;
  return guarded([&] {
    cs::app::ServeConfig sc;
    if (host != nullptr && *host != '\0') sc.host = host;
    need(port >= 0 && port <= 65535, "port must lie in 0..65535");
    need(threads >= 1, "threads must be positive");
    sc.port = port;
    sc.threads = threads;
    auto s = std::make_unique<cs_server>();
    s->model = model->model;
    s->server = std::make_unique<cs::app::Server>(s->model, sc);
    s->server->start();
    *out = s.release();
  });
}

cs_status cs_server_start_from_options(const char* options_json, cs_server** out) {
  if (out == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_server_start_from_options: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const json o = parse_options(options_json);
    for (const auto& [k, v] : o.items()) {
      (void)v;
      if (k != "config" && k != "checkpoint" && k != "corpus" && k != "host" && k != "port" && k != "threads") {
        throw cs::ConfigError("serve: unknown option '" + k + "'");
      }
    }
    const cs::app::RunConfig cfg = cs::app::config_from_options(json{{"config", o.value("config", json())}});
    cs::app::ServeConfig sc = cfg.serve;
    sc.port = cs::app::port_from_env(sc.port);
    if (o.contains("port")) sc.port = o["port"].get<int>();
    if (o.contains("host")) sc.host = o["host"].get<std::string>();
    if (o.contains("threads")) sc.threads = o["threads"].get<int>();
    need(sc.port >= 0 && sc.port <= 65535, "port must lie in 0..65535");
    need(sc.threads >= 1, "threads must be positive");
    const std::filesystem::path ck =
        o.contains("checkpoint") ? std::filesystem::path(o["checkpoint"].get<std::string>()) : cfg.resolve(cfg.paths.checkpoint);
    const std::filesystem::path corpus =
        o.contains("corpus") ? std::filesystem::path(o["corpus"].get<std::string>()) : cfg.resolve(cfg.paths.corpus);
    auto s = std::make_unique<cs_server>();
    s->model = cs::app::ServedModel::load(ck, corpus);
    s->server = std::make_unique<cs::app::Server>(s->model, sc, cfg.metrics);
    s->server->start();
    *out = s.release();
  });
}

int cs_server_port(const cs_server* server) { return server == nullptr ? -1 : server->server->port(); }

cs_status cs_server_wait(cs_server* server) {
  if (server == nullptr) return fail(CS_ERR_INVALID_ARGUMENT, "cs_server_wait: NULL server");
  return guarded([&] { server->server->wait(); });
}

void cs_server_stop(cs_server* server) {
  if (server != nullptr) server->server->stop();
}

void cs_server_free(cs_server* server) { delete server; }

}  // extern "C"
