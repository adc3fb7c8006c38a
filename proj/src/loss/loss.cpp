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
#include "coastsurr/loss/loss.hpp"

#include <algorithm>
#include <cmath>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/numerics.hpp"

namespace coastsurr {

using nlohmann::json;

void LossConfig::validate() const {
  if (alpha_h < 0 || alpha_c < 0 || alpha_q < 0) throw ConfigError("loss weights must be non-negative");
  if (std::abs(alpha_h + alpha_c + alpha_q - 1.0) > 1e-9) {
    throw ConfigError("loss weights alpha_h + alpha_c + alpha_q must sum to 1");
  }
  if (!(delta_lo > 0.0) || !(delta_lo <= delta_hi)) throw ConfigError("loss requires 0 < delta_lo <= delta_hi");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("loss.tau must lie in (0, 1)");
  if (fixed_delta && !(*fixed_delta > 0.0)) throw ConfigError("loss.fixed_delta must be positive");
}

json LossConfig::to_json() const {
  json j = {{"alpha_h", alpha_h}, {"alpha_c", alpha_c}, {"alpha_q", alpha_q},
            {"delta_lo", delta_lo}, {"delta_hi", delta_hi}, {"tau", tau}};
  j["fixed_delta"] = fixed_delta ? json(*fixed_delta) : json(nullptr);
  return j;
}

LossConfig LossConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("loss config must be a JSON object");
  LossConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "alpha_h") c.alpha_h = v.get<double>();
      else if (key == "alpha_c") c.alpha_c = v.get<double>();
      else if (key == "alpha_q") c.alpha_q = v.get<double>();
      else if (key == "delta_lo") c.delta_lo = v.get<double>();
      else if (key == "delta_hi") c.delta_hi = v.get<double>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "fixed_delta") c.fixed_delta = v.is_null() ? std::nullopt : std::optional(v.get<double>());
      else throw ConfigError("unknown key 'loss." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("loss." + key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

double huber(double e, double delta) noexcept {
  const double a = std::abs(e);
  return a <= delta ? 0.5 * e * e : delta * a - 0.5 * delta * delta;
}

double huber_grad(double e, double delta) noexcept {
  return std::abs(e) <= delta ? e : (e > 0 ? delta : -delta);
}

double log_cosh(double e) noexcept {
  const double a = std::abs(e);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_cosh_grad(double e) noexcept { return std::tanh(e); }

double quantile(double e, double tau) noexcept { return e >= 0 ? tau * e : (tau - 1.0) * e; }

double quantile_grad(double e, double tau) noexcept { return e >= 0 ? tau : tau - 1.0; }

double batch_delta(std::span<const double> pred, std::span<const double> truth, const LossConfig& cfg) {
  if (pred.size() != truth.size()) throw ShapeError("loss: prediction and truth sizes differ");
  if (cfg.fixed_delta) return *cfg.fixed_delta;
  std::vector<double> abs_err(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) abs_err[k] = std::abs(pred[k] - truth[k]);
  return std::clamp(median(std::move(abs_err)), cfg.delta_lo, cfg.delta_hi);
}

LossValue hybrid_loss(std::span<const double> pred, std::span<const double> truth, const LossConfig& cfg,
                      std::vector<double>* grad) {
  if (pred.size() != truth.size()) {
    throw ShapeError("loss: prediction has " + std::to_string(pred.size()) + " elements, truth has " +
                     std::to_string(truth.size()));
  }
  if (pred.empty()) throw ShapeError("loss: empty batch");
  LossValue out;
  out.delta = batch_delta(pred, truth, cfg);
  const std::size_t n = pred.size();
  std::vector<double> h(n), c(n), q(n);
  if (grad) grad->assign(n, 0.0);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = pred[k] - truth[k];
    h[k] = huber(e, out.delta);
    c[k] = log_cosh(e);
    q[k] = quantile(e, cfg.tau);
    if (grad) {
      (*grad)[k] = inv * (cfg.alpha_h * huber_grad(e, out.delta) + cfg.alpha_c * log_cosh_grad(e) +
                          cfg.alpha_q * quantile_grad(e, cfg.tau));
    }
  }
  out.huber = pairwise_sum(h) * inv;
  out.log_cosh = pairwise_sum(c) * inv;
  out.quantile = pairwise_sum(q) * inv;
  out.total = cfg.alpha_h * out.huber + cfg.alpha_c * out.log_cosh + cfg.alpha_q * out.quantile;
  return out;
}

}  // namespace coastsurr
