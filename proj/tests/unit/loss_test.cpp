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

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/numerics.hpp"
#include "coastsurr/core/random.hpp"
#include "coastsurr/loss/loss.hpp"

namespace coastsurr {
namespace {

TEST(Loss, HuberReferenceValues) {
  EXPECT_EQ(huber(0.0, 0.5), 0.0);
  EXPECT_NEAR(huber(0.2, 0.5), 0.02, 1e-12);
  EXPECT_NEAR(huber(1.0, 0.5), 0.375, 1e-12);
  EXPECT_NEAR(huber(-1.0, 0.5), 0.375, 1e-12);
}

TEST(Loss, QuantileReferenceValues) {
  EXPECT_NEAR(quantile(2.0, 0.75), 1.5, 1e-12);
  EXPECT_NEAR(quantile(-2.0, 0.75), 0.5, 1e-12);
  for (double e : {-3.0, -0.1, 0.0, 0.4, 7.0}) EXPECT_NEAR(quantile(e, 0.5), 0.5 * std::abs(e), 1e-15);
}

TEST(Loss, LogCoshReferenceValues) {
  EXPECT_NEAR(log_cosh(0.0), 0.0, 1e-15);
  // log(cosh(1)) = log((e + 1/e) / 2) evaluated in long double.
  const long double ref = std::log((std::exp(1.0L) + std::exp(-1.0L)) / 2.0L);
  EXPECT_NEAR(log_cosh(1.0), static_cast<double>(ref), 1e-12);
  EXPECT_NEAR(log_cosh(1.0), 0.433780830483027, 1e-9);
  EXPECT_NEAR(log_cosh(50.0), 50.0 - std::log(2.0), 1e-12);
  EXPECT_NEAR(log_cosh(-800.0), 800.0 - std::log(2.0), 1e-9);
  EXPECT_EQ(log_cosh(0.7), log_cosh(-0.7));
}

TEST(Loss, HuberIsContinuouslyDifferentiableAtDelta) {
  for (double delta : {0.3, 0.5, 0.7}) {
    const double h = 1e-7;
    const double left = (huber(delta, delta) - huber(delta - h, delta)) / h;
    const double right = (huber(delta + h, delta) - huber(delta, delta)) / h;
    EXPECT_NEAR(huber_grad(delta - 1e-15, delta), huber_grad(delta + 1e-15, delta), 1e-9);
    EXPECT_NEAR(left, right, 1e-6);
    EXPECT_NEAR(huber(delta - 1e-12, delta), huber(delta + 1e-12, delta), 1e-9);
  }
}

TEST(Loss, ComponentGradientsMatchFiniteDifferences) {
  Rng rng(5);
  const double h = 1e-6;
  for (int k = 0; k < 500; ++k) {
    const double e = rng.uniform(-3.0, 3.0);
    const double delta = rng.uniform(0.3, 0.7);
    const double tau = rng.uniform(0.05, 0.95);
    if (std::abs(std::abs(e) - delta) < 1e-4 || std::abs(e) < 1e-4) continue;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); };
    EXPECT_LT(rel(huber_grad(e, delta), (huber(e + h, delta) - huber(e - h, delta)) / (2 * h)), 1e-5);
    EXPECT_LT(rel(log_cosh_grad(e), (log_cosh(e + h) - log_cosh(e - h)) / (2 * h)), 1e-5);
    EXPECT_LT(rel(quantile_grad(e, tau), (quantile(e + h, tau) - quantile(e - h, tau)) / (2 * h)), 1e-5);
  }
}

TEST(Loss, HybridGradientMatchesFiniteDifferencesWithDeltaHeld) {
  Rng rng(6);
  LossConfig cfg;
  std::vector<double> pred(32), truth(32);
  for (auto& v : pred) v = rng.uniform(0.0, 2.0);
  for (auto& v : truth) v = rng.uniform(0.0, 2.0);
  std::vector<double> grad;
  const auto base = hybrid_loss(pred, truth, cfg, &grad);
  LossConfig held = cfg;
  held.fixed_delta = base.delta;
  const double h = 1e-6;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    auto up = pred, down = pred;
    up[k] += h;
    down[k] -= h;
    const double fd = (hybrid_loss(up, truth, held).total - hybrid_loss(down, truth, held).total) / (2 * h);
    EXPECT_LT(std::abs(fd - grad[k]) / std::max(std::abs(fd), 1e-8), 1e-5) << k;
  }
}

TEST(Loss, HybridEqualsIndependentComponentSum) {
  Rng rng(7);
  LossConfig cfg;
  cfg.fixed_delta = 0.5;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(16), t(16);
    for (auto& v : p) v = rng.uniform(-1.0, 3.0);
    for (auto& v : t) v = rng.uniform(0.0, 2.0);
    long double sum = 0.0L;
    for (int k = 0; k < 16; ++k) {
      const long double e = p[k] - t[k];
      const long double a = std::abs(e);
      const long double hb = a <= 0.5L ? 0.5L * e * e : 0.5L * a - 0.125L;
      const long double lc = std::log(std::cosh(e));
      const long double q = e >= 0 ? 0.5L * e : -0.5L * e;
      sum += 0.3L * hb + 0.5L * lc + 0.2L * q;
    }
    EXPECT_NEAR(hybrid_loss(p, t, cfg).total, static_cast<double>(sum / 16.0L), 1e-9);
  }
}

TEST(Loss, DegenerateMixturesAndZeroLoss) {
  std::vector<double> p = {0.0, 1.0, 2.0, 0.5}, t = {0.2, 0.2, 0.4, 0.5};
  LossConfig pure;
  pure.alpha_h = 1.0;
  pure.alpha_c = 0.0;
  pure.alpha_q = 0.0;
  pure.fixed_delta = 0.5;
  double ref = 0.0;
  for (int k = 0; k < 4; ++k) ref += huber(p[k] - t[k], 0.5) / 4.0;
  EXPECT_NEAR(hybrid_loss(p, t, pure).total, ref, 1e-15);
  const auto z = hybrid_loss(t, t, LossConfig{});
  EXPECT_EQ(z.total, 0.0);
  EXPECT_GT(hybrid_loss(p, t, LossConfig{}).total, 0.0);
}

TEST(Loss, DeltaIsClampedMedian) {
  LossConfig cfg;
  std::vector<double> zero(10, 0.0);
  std::vector<double> small(10, 0.1), big(10, 5.0), mid = {0.4, 0.5, 0.6, 0.45, 0.55, 0.42, 0.43, 0.44, 0.6, 0.6};
  EXPECT_EQ(batch_delta(small, zero, cfg), 0.3);
  EXPECT_EQ(batch_delta(big, zero, cfg), 0.7);
  EXPECT_NEAR(batch_delta(mid, zero, cfg), 0.475, 1e-15);
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> p(9), t(9);
    for (auto& v : p) v = rng.uniform(0, 4 * rng.uniform());
    for (auto& v : t) v = rng.uniform(0, 1);
    const double d = hybrid_loss(p, t, cfg).delta;
    EXPECT_GE(d, cfg.delta_lo);
    EXPECT_LE(d, cfg.delta_hi);
  }
}

TEST(Loss, ConfigValidation) {
  LossConfig c;
  c.alpha_h = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LossConfig{};
  c.tau = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LossConfig{};
  c.delta_lo = 0.8;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(LossConfig::from_json(LossConfig{}.to_json()).to_json(), LossConfig{}.to_json());
  EXPECT_THROW(LossConfig::from_json({{"beta", 1}}), ConfigError);
  std::vector<double> a(3), b(4);
  EXPECT_THROW(hybrid_loss(a, b, LossConfig{}), ShapeError);
}

TEST(Numerics, PairwiseSumAndMedian) {
  std::vector<double> v(1000);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k);
  EXPECT_EQ(pairwise_sum(v), 499500.0);
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_EQ(median({}), 0.0);
}

TEST(Numerics, SpearmanWithTies) {
  std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 4, 6, 8, 100};
  EXPECT_NEAR(spearman(a, b), 1.0, 1e-15);
  std::vector<double> c = {5, 4, 3, 2, 1};
  EXPECT_NEAR(spearman(a, c), -1.0, 1e-15);
  const auto r = average_ranks(std::vector<double>{10, 20, 20, 30});
  EXPECT_EQ(r, (std::vector<double>{1, 2.5, 2.5, 4}));
  std::vector<double> flat(5, 1.0);
  EXPECT_EQ(spearman(a, flat), 0.0);
}

}  // namespace
}  // namespace coastsurr
