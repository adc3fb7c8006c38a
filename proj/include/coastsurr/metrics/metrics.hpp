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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/core/types.hpp"

namespace coastsurr {

struct MetricsConfig {
  double zero_tol = 1e-6;
  double delta_high = 0.5;
  double delta_low = 0.1;
  /// Acc[0] as the share of zero pixels in the truth, ignoring predictions.
  bool acc0_literal = false;
};

/// Per-sample values. Excluded entries are NaN.
struct SampleMetrics {
  std::string scenario_id;
  double mae = 0.0;
  double rmse = 0.0;
  double rtae_pct = 0.0;
  double r2 = 0.0;
  double gt_high_pct = 0.0;
  double gt_low_pct = 0.0;
  double acc0_pct = 0.0;
  double dsc = 0.0;
};

struct MetricsReport {
  double amae = 0.0;
  double armse = 0.0;
  double artae_pct = 0.0;
  double r2 = 0.0;
  double delta_gt_05_pct = 0.0;
  double delta_gt_01_pct = 0.0;
  double acc0_pct = 0.0;
  double dsc = 0.0;
  int n_samples = 0;
  std::vector<SampleMetrics> per_sample;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  void write_json(const std::filesystem::path& path) const;
  void write_csv(const std::filesystem::path& path) const;
};

// Set-level metrics: per-sample values averaged over samples. Inputs are
// parallel lists of equally sized grids.
double amae(std::span<const Grid> preds, std::span<const Grid> truths);
double armse(std::span<const Grid> preds, std::span<const Grid> truths);
/// Throws NumericError when every truth is all-zero.
double artae(std::span<const Grid> preds, std::span<const Grid> truths);
/// Samples with constant truth are skipped; throws NumericError if none remain.
double r2(std::span<const Grid> preds, std::span<const Grid> truths);
double threshold_exceedance(std::span<const Grid> preds, std::span<const Grid> truths, double delta);
/// Throws NumericError when no sample has a zero-truth pixel.
double acc0(std::span<const Grid> preds, std::span<const Grid> truths, double zero_tol = 1e-6,
            bool literal = false);
double dsc(std::span<const Grid> preds, std::span<const Grid> truths, double zero_tol = 1e-6);

SampleMetrics sample_metrics(const Grid& pred, const Grid& truth, const MetricsConfig& cfg = {});

/// Throws ShapeError on size mismatch and Error on an empty set.
MetricsReport evaluate(std::span<const Grid> preds, std::span<const Grid> truths, const MetricsConfig& cfg = {},
                       std::span<const std::string> ids = {});

/// Constant predictor at the training-set mean grid value.
struct NaiveBaseline {
  double mean = 0.0;
  Grid predict(int n) const { return Grid(n, static_cast<float>(mean)); }
};

NaiveBaseline naive_baseline(std::span<const Grid> train_truths);

}  // namespace coastsurr
