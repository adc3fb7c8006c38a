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
#include "coastsurr/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/numerics.hpp"

namespace coastsurr {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(const Grid& p, const Grid& t) {
  if (p.n() != t.n()) {
    throw ShapeError("prediction is " + std::to_string(p.n()) + "x" + std::to_string(p.n()) + ", truth is " +
                     std::to_string(t.n()) + "x" + std::to_string(t.n()));
  }
}

void check_sets(std::span<const Grid> preds, std::span<const Grid> truths) {
  if (preds.size() != truths.size()) {
    throw ShapeError("prediction set has " + std::to_string(preds.size()) + " samples, truth set has " +
                     std::to_string(truths.size()));
  }
  if (preds.empty()) throw Error("metrics require at least one sample");
  for (std::size_t k = 0; k < preds.size(); ++k) check_pair(preds[k], truths[k]);
}

double pixel_mean(const Grid& p, const Grid& t, double (*f)(double, double, double), double arg) {
  const auto pv = p.values();
  const auto tv = t.values();
  std::vector<double> terms(pv.size());
  for (std::size_t k = 0; k < pv.size(); ++k) terms[k] = f(pv[k], tv[k], arg);
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

double sample_mae(const Grid& p, const Grid& t) {
  return pixel_mean(p, t, [](double a, double b, double) { return std::abs(a - b); }, 0.0);
}

double sample_rmse(const Grid& p, const Grid& t) {
  return std::sqrt(pixel_mean(p, t, [](double a, double b, double) { return (a - b) * (a - b); }, 0.0));
}

double sample_rtae(const Grid& p, const Grid& t) {
  const auto pv = p.values();
  const auto tv = t.values();
  std::vector<double> err(pv.size()), ref(pv.size());
  for (std::size_t k = 0; k < pv.size(); ++k) {
    err[k] = std::abs(static_cast<double>(pv[k]) - tv[k]);
    ref[k] = std::abs(static_cast<double>(tv[k]));
  }
  const double denom = pairwise_sum(ref);
  if (!(denom > 0.0)) return kNaN;
  return 100.0 * pairwise_sum(err) / denom;
}

double sample_r2(const Grid& p, const Grid& t) {
  const auto pv = p.values();
  const auto tv = t.values();
  std::vector<double> buf(tv.begin(), tv.end());
  const double mean = pairwise_sum(buf) / static_cast<double>(buf.size());
  std::vector<double> res(pv.size()), tot(pv.size());
  for (std::size_t k = 0; k < pv.size(); ++k) {
    const double e = static_cast<double>(tv[k]) - pv[k];
    const double d = static_cast<double>(tv[k]) - mean;
    res[k] = e * e;
    tot[k] = d * d;
  }
  const double ss_tot = pairwise_sum(tot);
  if (!(ss_tot > 0.0)) return kNaN;
  return 1.0 - pairwise_sum(res) / ss_tot;
}

double sample_exceed(const Grid& p, const Grid& t, double delta) {
  return 100.0 * pixel_mean(p, t, [](double a, double b, double d) { return std::abs(a - b) > d ? 1.0 : 0.0; },
                            delta);
}

double sample_acc0(const Grid& p, const Grid& t, double tol, bool literal) {
  const auto pv = p.values();
  const auto tv = t.values();
  std::size_t zeros = 0, hits = 0;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    if (std::abs(static_cast<double>(tv[k])) > tol) continue;
    ++zeros;
    if (std::abs(static_cast<double>(pv[k])) <= tol) ++hits;
  }
  if (literal) return 100.0 * static_cast<double>(zeros) / static_cast<double>(pv.size());
  if (zeros == 0) return kNaN;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(zeros);
}

double sample_dsc(const Grid& p, const Grid& t, double tol) {
  const auto pv = p.values();
  const auto tv = t.values();
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    const bool pw = pv[k] > tol, tw = tv[k] > tol;
    if (pw && tw) ++tp;
    else if (pw) ++fp;
    else if (tw) ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

/// Mean of the finite entries; NaN when none are finite.
double finite_mean(const std::vector<double>& v, std::size_t* used = nullptr) {
  std::vector<double> keep;
  for (double x : v) {
    if (std::isfinite(x)) keep.push_back(x);
  }
  if (used) *used = keep.size();
  if (keep.empty()) return kNaN;
  return pairwise_sum(keep) / static_cast<double>(keep.size());
}

template <typename F>
std::vector<double> per_sample(std::span<const Grid> preds, std::span<const Grid> truths, F&& f) {
  check_sets(preds, truths);
  std::vector<double> out(preds.size());
  for (std::size_t k = 0; k < preds.size(); ++k) out[k] = f(preds[k], truths[k]);
  return out;
}

double finite_mean_or_throw(const std::vector<double>& v, const char* what) {
  const double m = finite_mean(v);
  if (std::isnan(m)) throw NumericError(std::string(what) + " is undefined for every sample");
  return m;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

double amae(std::span<const Grid> preds, std::span<const Grid> truths) {
  return finite_mean(per_sample(preds, truths, sample_mae));
}

double armse(std::span<const Grid> preds, std::span<const Grid> truths) {
  return finite_mean(per_sample(preds, truths, sample_rmse));
}

double artae(std::span<const Grid> preds, std::span<const Grid> truths) {
  return finite_mean_or_throw(per_sample(preds, truths, sample_rtae), "ARTAE (all truths are zero)");
}

double r2(std::span<const Grid> preds, std::span<const Grid> truths) {
  return finite_mean_or_throw(per_sample(preds, truths, sample_r2), "R2 (every truth is constant)");
}

double threshold_exceedance(std::span<const Grid> preds, std::span<const Grid> truths, double delta) {
  return finite_mean(
      per_sample(preds, truths, [delta](const Grid& p, const Grid& t) { return sample_exceed(p, t, delta); }));
}

double acc0(std::span<const Grid> preds, std::span<const Grid> truths, double zero_tol, bool literal) {
  return finite_mean_or_throw(per_sample(preds, truths,
                                         [&](const Grid& p, const Grid& t) {
                                           return sample_acc0(p, t, zero_tol, literal);
                                         }),
                              "Acc[0] (no zero-truth pixels)");
}

double dsc(std::span<const Grid> preds, std::span<const Grid> truths, double zero_tol) {
  return finite_mean(
      per_sample(preds, truths, [zero_tol](const Grid& p, const Grid& t) { return sample_dsc(p, t, zero_tol); }));
}

SampleMetrics sample_metrics(const Grid& pred, const Grid& truth, const MetricsConfig& cfg) {
  check_pair(pred, truth);
  SampleMetrics m;
  m.mae = sample_mae(pred, truth);
  m.rmse = sample_rmse(pred, truth);
  m.rtae_pct = sample_rtae(pred, truth);
  m.r2 = sample_r2(pred, truth);
  m.gt_high_pct = sample_exceed(pred, truth, cfg.delta_high);
  m.gt_low_pct = sample_exceed(pred, truth, cfg.delta_low);
  m.acc0_pct = sample_acc0(pred, truth, cfg.zero_tol, cfg.acc0_literal);
  m.dsc = sample_dsc(pred, truth, cfg.zero_tol);
  return m;
}

MetricsReport evaluate(std::span<const Grid> preds, std::span<const Grid> truths, const MetricsConfig& cfg,
                       std::span<const std::string> ids) {
  check_sets(preds, truths);
  if (!ids.empty() && ids.size() != preds.size()) throw LengthError("evaluate: id list length mismatch");
  MetricsReport r;
  r.n_samples = static_cast<int>(preds.size());
  std::vector<double> mae, rmse, rtae, rr, hi, lo, a0, d;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    auto m = sample_metrics(preds[k], truths[k], cfg);
    m.scenario_id = ids.empty() ? std::to_string(k) : ids[k];
    mae.push_back(m.mae);
    rmse.push_back(m.rmse);
    rtae.push_back(m.rtae_pct);
    rr.push_back(m.r2);
    hi.push_back(m.gt_high_pct);
    lo.push_back(m.gt_low_pct);
    a0.push_back(m.acc0_pct);
    d.push_back(m.dsc);
    if (std::isnan(m.rtae_pct)) r.warnings.push_back("sample " + m.scenario_id + ": all-zero truth, excluded from ARTAE");
    if (std::isnan(m.r2)) r.warnings.push_back("sample " + m.scenario_id + ": constant truth, excluded from R2");
    if (std::isnan(m.acc0_pct)) {
      r.warnings.push_back("sample " + m.scenario_id + ": no zero-truth pixels, excluded from Acc[0]");
    }
    r.per_sample.push_back(std::move(m));
  }
  r.amae = finite_mean(mae);
  r.armse = finite_mean(rmse);
  r.artae_pct = finite_mean(rtae);
  r.r2 = finite_mean(rr);
  r.delta_gt_05_pct = finite_mean(hi);
  r.delta_gt_01_pct = finite_mean(lo);
  r.acc0_pct = finite_mean(a0);
  r.dsc = finite_mean(d);
  return r;
}

json MetricsReport::to_json() const {
  json j = {{"AMAE", number_or_null(amae)},
            {"ARMSE", number_or_null(armse)},
            {"ARTAE", number_or_null(artae_pct)},
            {"R2", number_or_null(r2)},
            {"Delta>0.5", number_or_null(delta_gt_05_pct)},
            {"Delta>0.1", number_or_null(delta_gt_01_pct)},
            {"Acc[0]", number_or_null(acc0_pct)},
            {"DSC", number_or_null(dsc)},
            {"n_samples", n_samples},
            {"warnings", warnings}};
  return j;
}

void MetricsReport::write_json(const std::filesystem::path& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

void MetricsReport::write_csv(const std::filesystem::path& path) const {
  std::string out = "scenario,mae,rmse,rtae_pct,r2,gt_high_pct,gt_low_pct,acc0_pct,dsc\n";
  auto f = [](double v) {
    if (!std::isfinite(v)) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (const auto& m : per_sample) {
    out += m.scenario_id + "," + f(m.mae) + "," + f(m.rmse) + "," + f(m.rtae_pct) + "," + f(m.r2) + "," +
           f(m.gt_high_pct) + "," + f(m.gt_low_pct) + "," + f(m.acc0_pct) + "," + f(m.dsc) + "\n";
  }
  write_text_file(path, out);
}

NaiveBaseline naive_baseline(std::span<const Grid> train_truths) {
  if (train_truths.empty()) throw Error("naive baseline needs at least one training sample");
  std::vector<double> sums;
  std::size_t count = 0;
  for (const auto& g : train_truths) {
    std::vector<double> v(g.values().begin(), g.values().end());
    sums.push_back(pairwise_sum(v));
    count += v.size();
  }
  return NaiveBaseline{pairwise_sum(sums) / static_cast<double>(count)};
}

}  // namespace coastsurr
