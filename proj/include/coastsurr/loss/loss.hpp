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

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace coastsurr {

struct LossConfig {
  double alpha_h = 0.3;
  double alpha_c = 0.5;
  double alpha_q = 0.2;
  double delta_lo = 0.3;
  double delta_hi = 0.7;
  double tau = 0.5;
  /// When set, replaces the per-batch median rule.
  std::optional<double> fixed_delta;

  void validate() const;
  nlohmann::json to_json() const;
  static LossConfig from_json(const nlohmann::json& j);
};

// Per-element terms of e = y_p - y_t and their derivatives in y_p.
double huber(double e, double delta) noexcept;
double huber_grad(double e, double delta) noexcept;
/// log(cosh(e)) in the overflow-free form |e| + log1p(exp(-2|e|)) - log 2.
double log_cosh(double e) noexcept;
double log_cosh_grad(double e) noexcept;
/// tau * e when over-predicting, (1 - tau) * (-e) otherwise.
double quantile(double e, double tau) noexcept;
double quantile_grad(double e, double tau) noexcept;

/// clamp(median |y_p - y_t|, delta_lo, delta_hi), or fixed_delta.
double batch_delta(std::span<const double> pred, std::span<const double> truth, const LossConfig& cfg);

struct LossValue {
  double total = 0.0;
  double huber = 0.0;
  double log_cosh = 0.0;
  double quantile = 0.0;
  double delta = 0.0;
};

/// Mean over all elements of the weighted component sum. With grad, writes
/// d(total)/d(pred) per element; delta is held constant.
LossValue hybrid_loss(std::span<const double> pred, std::span<const double> truth, const LossConfig& cfg,
                      std::vector<double>* grad = nullptr);

}  // namespace coastsurr
