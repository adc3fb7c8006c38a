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
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/random.hpp"
#include "coastsurr/metrics/metrics.hpp"
#include "oracles.hpp"

namespace coastsurr {
namespace {

using oracle::random_grid;
using Oracle = oracle::Metrics;

TEST(Metrics, MatchBruteForceOracleOnRandomGrids) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int count = 1 + static_cast<int>(rng.below(4));
    std::vector<Grid> p, t;
    for (int k = 0; k < count; ++k) {
      p.push_back(random_grid(n, rng, rng.uniform()));
      t.push_back(random_grid(n, rng, rng.uniform()));
      if (rng.bernoulli(0.1)) p.back() = t.back();
    }
    std::vector<long double> mae, rmse, rtae, rr, hi, lo, a0, d;
    for (int k = 0; k < count; ++k) {
      long double v;
      mae.push_back(Oracle::mae(p[k], t[k]));
      rmse.push_back(Oracle::rmse(p[k], t[k]));
      if (Oracle::rtae(p[k], t[k], v)) rtae.push_back(v);
      if (Oracle::r2(p[k], t[k], v)) rr.push_back(v);
      hi.push_back(Oracle::exceed(p[k], t[k], 0.5));
      lo.push_back(Oracle::exceed(p[k], t[k], 0.1));
      if (Oracle::acc0(p[k], t[k], 1e-6, v)) a0.push_back(v);
      d.push_back(Oracle::dsc(p[k], t[k], 1e-6));
    }
    const auto rep = evaluate(p, t);
    const double tol = 1e-9;
    EXPECT_NEAR(rep.amae, Oracle::mean(mae), tol);
    EXPECT_NEAR(amae(p, t), Oracle::mean(mae), tol);
    EXPECT_NEAR(rep.armse, Oracle::mean(rmse), tol);
    EXPECT_NEAR(armse(p, t), Oracle::mean(rmse), tol);
    if (rtae.empty()) {
      EXPECT_TRUE(std::isnan(rep.artae_pct));
      EXPECT_THROW(artae(p, t), NumericError);
    } else {
      EXPECT_NEAR(rep.artae_pct, Oracle::mean(rtae), tol);
      EXPECT_NEAR(artae(p, t), Oracle::mean(rtae), tol);
    }
    if (rr.empty()) {
      EXPECT_THROW(r2(p, t), NumericError);
    } else {
      EXPECT_NEAR(r2(p, t), Oracle::mean(rr), tol);
      EXPECT_NEAR(rep.r2, Oracle::mean(rr), tol);
    }
    EXPECT_NEAR(rep.delta_gt_05_pct, Oracle::mean(hi), tol);
    EXPECT_NEAR(threshold_exceedance(p, t, 0.1), Oracle::mean(lo), tol);
    if (a0.empty()) {
      EXPECT_THROW(acc0(p, t), NumericError);
    } else {
      EXPECT_NEAR(acc0(p, t), Oracle::mean(a0), tol);
    }
    EXPECT_NEAR(rep.dsc, Oracle::mean(d), tol);
    EXPECT_NEAR(dsc(p, t), Oracle::mean(d), tol);
  }
}

TEST(Metrics, DscFormulaCases) {
  Grid a(2, std::vector<float>{1, 1, 0, 0});
  Grid b(2, std::vector<float>{0, 0, 1, 1});
  EXPECT_EQ(dsc(std::vector<Grid>{a}, std::vector<Grid>{a}), 1.0);
  EXPECT_EQ(dsc(std::vector<Grid>{a}, std::vector<Grid>{b}), 0.0);
  Grid truth(2, std::vector<float>{1, 1, 1, 1});
  Grid pred(2, std::vector<float>{1, 1, 0, 0});
  EXPECT_EQ(dsc(std::vector<Grid>{pred}, std::vector<Grid>{truth}), 2.0 / 3.0);
  Grid empty(2);
  EXPECT_EQ(dsc(std::vector<Grid>{empty}, std::vector<Grid>{empty}), 1.0);
}

TEST(Metrics, ReferenceCases) {
  Grid t(2, std::vector<float>{0.0f, 1.0f, 2.0f, 0.5f});
  Grid p = t;
  for (auto& v : p.storage()) v += 0.1f;
  EXPECT_NEAR(amae(std::vector<Grid>{p}, std::vector<Grid>{t}), 0.1, 1e-6);
  Grid z(2);
  Grid e(2, std::vector<float>{3, 4, 0, 0});
  EXPECT_NEAR(armse(std::vector<Grid>{e}, std::vector<Grid>{z}), 2.5, 1e-12);
  Grid dbl = t;
  for (auto& v : dbl.storage()) v *= 2;
  EXPECT_NEAR(artae(std::vector<Grid>{dbl}, std::vector<Grid>{t}), 100.0, 1e-9);
  Grid mean(2, 0.875f);
  EXPECT_NEAR(r2(std::vector<Grid>{mean}, std::vector<Grid>{t}), 0.0, 1e-12);
  Grid off(2, std::vector<float>{1, 2, 3, 1.5f});
  EXPECT_EQ(threshold_exceedance(std::vector<Grid>{off}, std::vector<Grid>{t}, 0.5), 100.0);
  Grid half_zero(2, std::vector<float>{0, 0, 0, 0});
  Grid half_pred(2, std::vector<float>{0, 1, 0, 0});
  Grid zeros_truth(2, std::vector<float>{0, 0, 5, 5});
  EXPECT_EQ(acc0(std::vector<Grid>{half_pred}, std::vector<Grid>{zeros_truth}), 50.0);
  Grid plus_one = zeros_truth;
  for (auto& v : plus_one.storage()) v += 1;
  EXPECT_EQ(acc0(std::vector<Grid>{plus_one}, std::vector<Grid>{zeros_truth}), 0.0);
  EXPECT_EQ(acc0(std::vector<Grid>{half_zero}, std::vector<Grid>{zeros_truth}), 100.0);
  EXPECT_EQ(acc0(std::vector<Grid>{plus_one}, std::vector<Grid>{zeros_truth}, 1e-6, true), 50.0);
}

TEST(Metrics, IdenticalSetsGivePerfectReport) {
  Rng rng(2);
  std::vector<Grid> t;
  for (int k = 0; k < 5; ++k) t.push_back(random_grid(6, rng, 0.5));
  const auto r = evaluate(t, t);
  EXPECT_EQ(r.amae, 0.0);
  EXPECT_EQ(r.armse, 0.0);
  EXPECT_EQ(r.artae_pct, 0.0);
  EXPECT_EQ(r.r2, 1.0);
  EXPECT_EQ(r.delta_gt_05_pct, 0.0);
  EXPECT_EQ(r.delta_gt_01_pct, 0.0);
  EXPECT_EQ(r.acc0_pct, 100.0);
  EXPECT_EQ(r.dsc, 1.0);
  EXPECT_EQ(r.n_samples, 5);
}

TEST(Metrics, ErrorsAndWarnings) {
  std::vector<Grid> none;
  EXPECT_THROW(evaluate(none, none), Error);
  std::vector<Grid> a = {Grid(2)}, b = {Grid(3)};
  EXPECT_THROW(evaluate(a, b), ShapeError);
  std::vector<Grid> two = {Grid(2), Grid(2)};
  EXPECT_THROW(evaluate(a, two), ShapeError);
  const auto r = evaluate(a, a);
  EXPECT_TRUE(std::isnan(r.artae_pct));
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_TRUE(r.to_json()["ARTAE"].is_null());
}

TEST(Metrics, EvaluateIsPermutationInvariant) {
  Rng rng(3);
  std::vector<Grid> p, t;
  for (int k = 0; k < 7; ++k) {
    p.push_back(random_grid(5, rng, 0.4));
    t.push_back(random_grid(5, rng, 0.4));
  }
  const auto base = evaluate(p, t).to_json();
  std::vector<std::size_t> order = {3, 0, 6, 1, 5, 2, 4};
  std::vector<Grid> pp, tt;
  for (auto k : order) {
    pp.push_back(p[k]);
    tt.push_back(t[k]);
  }
  const auto perm = evaluate(pp, tt).to_json();
  for (const char* key : {"AMAE", "ARMSE", "ARTAE", "R2", "Delta>0.5", "Delta>0.1", "Acc[0]", "DSC"}) {
    EXPECT_NEAR(base[key].get<double>(), perm[key].get<double>(), 1e-12) << key;
  }
}

TEST(Metrics, DscDropsWhenCorrectPixelFlips) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    Grid t = random_grid(6, rng, 0.5);
    Grid p = random_grid(6, rng, 0.5);
    const double before = dsc(std::vector<Grid>{p}, std::vector<Grid>{t});
    std::vector<int> correct;
    for (int k = 0; k < 36; ++k) {
      if ((p.storage()[k] > 1e-6f) == (t.storage()[k] > 1e-6f)) correct.push_back(k);
    }
    if (correct.empty()) continue;
    const int k = correct[rng.below(correct.size())];
    p.storage()[k] = p.storage()[k] > 1e-6f ? 0.0f : 1.0f;
    const double after = dsc(std::vector<Grid>{p}, std::vector<Grid>{t});
    EXPECT_LT(after, before);
  }
}

TEST(Metrics, Acc0IgnoresPredictionsOnWetTruth) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Grid t = random_grid(5, rng, 0.5);
    Grid p = random_grid(5, rng, 0.5);
    Grid q = p;
    for (int k = 0; k < 25; ++k) {
      if (t.storage()[k] > 1e-6f) q.storage()[k] = static_cast<float>(rng.uniform(-3, 3));
    }
    if (t.count_nonzero() == 25) continue;
    EXPECT_EQ(acc0(std::vector<Grid>{p}, std::vector<Grid>{t}), acc0(std::vector<Grid>{q}, std::vector<Grid>{t}));
  }
}

TEST(Metrics, NaiveBaseline) {
  std::vector<Grid> zeros = {Grid(3), Grid(3)};
  EXPECT_EQ(naive_baseline(zeros).mean, 0.0);
  std::vector<Grid> t = {Grid(2, std::vector<float>{0.2f, 0.6f, 0.4f, 0.4f})};
  const auto nb = naive_baseline(t);
  EXPECT_NEAR(nb.mean, 0.4, 1e-7);
  std::vector<Grid> pred = {nb.predict(2)};
  long double mad = 0;
  for (float v : t[0].values()) mad += std::fabs(v - static_cast<long double>(static_cast<float>(nb.mean)));
  EXPECT_NEAR(amae(pred, t), static_cast<double>(mad / 4), 1e-9);
  std::vector<Grid> none;
  EXPECT_THROW(naive_baseline(none), Error);
}

TEST(Metrics, ReportFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "coastsurr_metrics_test";
  std::filesystem::create_directories(dir);
  std::vector<Grid> t = {Grid(2, std::vector<float>{0, 1, 2, 3})};
  const auto r = evaluate(t, t, MetricsConfig{}, std::vector<std::string>{"s1"});
  r.write_json(dir / "m.json");
  r.write_csv(dir / "m.csv");
  const auto j = nlohmann::json::parse(read_text_file(dir / "m.json"));
  EXPECT_EQ(j["DSC"].get<double>(), 1.0);
  EXPECT_NE(read_text_file(dir / "m.csv").find("s1,0,0,0,1,0,0,100,1"), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace coastsurr
