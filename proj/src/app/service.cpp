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
#include "coastsurr/app/service.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "coastsurr/app/codec.hpp"
#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/scenario.hpp"
#include "coastsurr/training/checkpoint.hpp"
#include "coastsurr/training/ensemble.hpp"
#include "coastsurr/training/gradcam.hpp"
#include "coastsurr/training/trainer.hpp"

namespace coastsurr::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<const ServedModel> ServedModel::load(const fs::path& model_path,
                                                     const fs::path& corpus_dir) {
  auto m = std::make_shared<ServedModel>();
  if (!fs::exists(model_path)) throw NotFoundError("model not found: " + model_path.string());
  if (is_ensemble_dir(model_path)) {
    m->members = load_ensemble(model_path);
  } else {
    m->members.push_back(load_checkpoint(model_path));
  }
  for (const char* f : {"region.json", "footprint.cstc", "manifest.json"}) {
    if (!fs::exists(corpus_dir / f)) {
      throw NotFoundError("corpus directory " + corpus_dir.string() + " lacks " + f);
    }
  }
  m->region = load_region(corpus_dir / "region.json");
  m->footprint = Footprint::read(corpus_dir / "footprint.cstc");
  m->slr_levels = Manifest::read(corpus_dir / "manifest.json").slr_levels;
  if (m->footprint.spec.n != m->n()) {
    throw ShapeError("model grid n=" + std::to_string(m->n()) + " does not match corpus n=" +
                     std::to_string(m->footprint.spec.n));
  }
  if (m->footprint.olu_count != m->region.olu_count()) {
    throw ShapeError("footprint and region disagree on the OLU count");
  }
  std::string joined;
  for (const auto& net : m->members) joined += model_version(net.params());
  if (m->members.size() == 1) {
    m->version = joined;
  } else {
    m->version = "ens" + std::to_string(m->members.size()) + "-" + fnv1a_hex(joined);
  }
  m->source = model_path.string();
  return m;
}

namespace {

HttpReply field_error(int status, const std::string& field, const std::string& message) {
  return {status, {{"error", message}, {"field", field}}};
}

}  // namespace

PredictService::PredictService(std::shared_ptr<const ServedModel> model, MetricsConfig metrics)
    : model_(std::move(model)), metrics_(metrics) {
  if (!model_ || model_->members.empty()) throw ConfigError("service needs a loaded model");
}

HttpReply PredictService::health() const {
  return {200,
          {{"status", "ok"},
           {"version", COASTSURR_VERSION_STRING},
           {"model_version", model_->version},
           {"members", model_->members.size()}}};
}

HttpReply PredictService::region() const {
  const auto& m = *model_;
  json r = region_to_json(m.region);
  json slr = {{"levels", m.slr_levels}, {"min", nullptr}, {"max", nullptr}};
  if (!m.slr_levels.empty()) {
    slr["min"] = *std::min_element(m.slr_levels.begin(), m.slr_levels.end());
    slr["max"] = *std::max_element(m.slr_levels.begin(), m.slr_levels.end());
  }
  return {200,
          {{"region", m.region.name},
           {"olu_count", m.region.olu_count()},
           {"olus", r["olus"]},
           {"n", m.n()},
           {"grid", grid_spec_to_json(m.footprint.spec)},
           {"slr", slr},
           {"uncertainty", m.is_ensemble()},
           {"gradcam_layers", gradcam_layers(m.members.front().config())}}};
}

HttpReply PredictService::predict(const std::string& body) const {
  const auto& m = *model_;
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return field_error(400, "body", std::string("request is not valid JSON: ") + e.what());
  }
  if (!req.is_object()) return field_error(400, "body", "request must be a JSON object");
  for (const auto& [k, v] : req.items()) {
    (void)v;
    if (k != "scenario" && k != "slr_m" && k != "uncertainty" && k != "gradcam" && k != "reference") {
      return field_error(400, k, "unknown field '" + k + "'");
    }
  }

  if (!req.contains("scenario") || !req["scenario"].is_string()) {
    return field_error(400, "scenario", "scenario must be a string of OLU bits");
  }
  const std::string text = req["scenario"].get<std::string>();
  const std::size_t k = m.region.olu_count();
  ProtectionScenario scenario;
  std::optional<double> slr;
  if (req.contains("slr_m")) {
    if (!req["slr_m"].is_number()) return field_error(400, "slr_m", "slr_m must be a number");
    slr = req["slr_m"].get<double>();
    if (!std::isfinite(*slr) || *slr < 0.0) {
      return field_error(400, "slr_m", "slr_m must be a finite non-negative depth in meters");
    }
  }
  try {
    if (text.find('_') != std::string::npos) {
      scenario = decode_scenario(text, k);
      if (slr && *slr != scenario.slr_m()) {
        return field_error(400, "slr_m", "slr_m disagrees with the scenario suffix");
      }
    } else {
      if (!slr) return field_error(400, "slr_m", "slr_m is required when the scenario has no suffix");
      scenario = ProtectionScenario(parse_bits(text, k), *slr);
    }
  } catch (const LengthError& e) {
    std::string msg = e.what();
    if (msg.find("expected " + std::to_string(k)) == std::string::npos) msg += "; expected " + std::to_string(k) + " OLU bits";
    return field_error(400, "scenario", msg);
  } catch (const Error& e) {
    return field_error(400, "scenario", e.what());
  }
  const double slr_m = scenario.slr_m();
  if (!std::isfinite(slr_m) || slr_m < 0.0) {
    return field_error(400, "slr_m", "slr_m must be a finite non-negative depth in meters");
  }

  bool want_std = false;
  if (req.contains("uncertainty")) {
    if (!req["uncertainty"].is_boolean()) return field_error(400, "uncertainty", "uncertainty must be a boolean");
    want_std = req["uncertainty"].get<bool>();
    if (want_std && !m.is_ensemble()) {
      return field_error(400, "uncertainty", "uncertainty needs an ensemble; this service runs a single model");
    }
  }
  std::optional<std::string> layer;
  if (req.contains("gradcam")) {
    const auto& g = req["gradcam"];
    if (g.is_boolean()) {
      if (g.get<bool>()) layer = "";
    } else if (g.is_string()) {
      const auto names = gradcam_layers(m.members.front().config());
      const std::string name = g.get<std::string>();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        return field_error(400, "gradcam", "unknown layer '" + name + "'");
      }
      layer = name;
    } else {
      return field_error(400, "gradcam", "gradcam must be a boolean or a layer name");
    }
  }
  std::optional<Grid> reference;
  if (req.contains("reference")) {
    try {
      reference = rle_decode(req["reference"]);
    } catch (const Error& e) {
      return field_error(400, "reference", e.what());
    }
    if (reference->n() != m.n()) {
      return field_error(400, "reference",
                         "reference grid n=" + std::to_string(reference->n()) + ", model n=" + std::to_string(m.n()));
    }
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid input = m.footprint.input_for(scenario);
    Grid pred;
    std::optional<Grid> stddev;
    if (m.is_ensemble()) {
      auto u = predict_with_uncertainty(m.members, input, slr_m);
      pred = std::move(u.mean);
      if (want_std) stddev = std::move(u.stddev);
    } else {
      pred = predict_grid(m.members.front(), input, slr_m);
    }
    std::optional<Grid> heat;
    if (layer) heat = grad_cam(m.members.front(), input, slr_m, *layer);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    for (float v : pred.values()) {
      if (!std::isfinite(v)) return {500, {{"error", "model produced a non-finite prediction"}}};
    }
    std::size_t flooded = 0;
    float max_pwl = 0.0f;
    for (float v : pred.values()) {
      if (v > metrics_.zero_tol) ++flooded;
      max_pwl = std::max(max_pwl, v);
    }
    json summary = {{"flooded_cells", flooded}, {"max_pwl_m", max_pwl}, {"dsc", nullptr}};
    if (reference) {
      const Grid* p = &pred;
      const Grid* t = &*reference;
      summary["dsc"] = dsc({p, 1}, {t, 1}, metrics_.zero_tol);
    }
    const bool extrapolated =
        !m.slr_levels.empty() && (slr_m < *std::min_element(m.slr_levels.begin(), m.slr_levels.end()) ||
                                  slr_m > *std::max_element(m.slr_levels.begin(), m.slr_levels.end()));
    json out = {{"scenario", encode_scenario(scenario)},
                {"n", m.n()},
                {"prediction", rle_encode(pred)},
                {"model_version", m.version},
                {"members", m.members.size()},
                {"inference_ms", ms},
                {"extrapolated", extrapolated},
                {"summary", summary}};
    if (stddev) out["std"] = rle_encode(*stddev);
    if (heat) out["heatmap"] = rle_encode(*heat);
    return {200, std::move(out)};
  } catch (const std::exception& e) {
    return {500, {{"error", std::string("model failure: ") + e.what()}}};
  }
}

int port_from_env(int fallback) {
  const char* v = std::getenv("COASTSURR_PORT");
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const long p = std::strtol(v, &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) throw ConfigError(std::string("COASTSURR_PORT is not a port: ") + v);
  return static_cast<int>(p);
}

struct Server::Impl {
  PredictService service;
  ServeConfig cfg;
  httplib::Server http;
  std::thread thread;
  int port = -1;
  std::mutex mu;
  std::condition_variable cv;
  bool finished = false;

  Impl(std::shared_ptr<const ServedModel> m, ServeConfig c, MetricsConfig metrics)
      : service(std::move(m), metrics), cfg(std::move(c)) {}
};

namespace {

void send(httplib::Response& res, const HttpReply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

Server::Server(std::shared_ptr<const ServedModel> model, ServeConfig cfg, MetricsConfig metrics)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(cfg), metrics)) {
  auto* impl = impl_.get();
  const int threads = std::max(1, impl->cfg.threads);
  impl->http.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  impl->http.Get("/health", [impl](const httplib::Request&, httplib::Response& res) {
    send(res, impl->service.health());
  });
  impl->http.Get("/region", [impl](const httplib::Request&, httplib::Response& res) {
    send(res, impl->service.region());
  });
  impl->http.Post("/predict", [impl](const httplib::Request& req, httplib::Response& res) {
    send(res, impl->service.predict(req.body));
  });
  impl->http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, {500, {{"error", what}}});
  });
  impl->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(json{{"error", "no route for " + req.method + " " + req.path}}.dump(), "application/json");
    }
  });
}

Server::~Server() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::start() {
  if (impl_->thread.joinable()) return impl_->port;
  const std::string& host = impl_->cfg.host;
  int port = impl_->cfg.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) throw IoError("cannot bind " + host + ":" + std::to_string(impl_->cfg.port));
  impl_->port = port;
  impl_->thread = std::thread([impl = impl_.get()] {
    impl->http.listen_after_bind();
    std::lock_guard<std::mutex> lock(impl->mu);
    impl->finished = true;
    impl->cv.notify_all();
  });
  impl_->http.wait_until_ready();
  return port;
}

int Server::port() const noexcept { return impl_->port; }

void Server::wait() {
  if (!impl_->thread.joinable()) return;
  std::unique_lock<std::mutex> lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->finished; });
}

void Server::stop() {
  if (impl_->thread.joinable()) impl_->http.stop();
}

}  // namespace coastsurr::app
