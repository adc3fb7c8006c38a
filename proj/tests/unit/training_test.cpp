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
#include "coastsurr/synth/synthgen.hpp"
#include "coastsurr/training/checkpoint.hpp"
#include "coastsurr/training/ensemble.hpp"
#include "coastsurr/training/gradcam.hpp"
#include "coastsurr/training/optimizer.hpp"
#include "coastsurr/training/trainer.hpp"

namespace coastsurr {
namespace {

namespace fs = std::filesystem;

nn::ModelConfig toy_model() {
  nn::ModelConfig c;
  c.depth_k = 2;
  c.base_channels = 4;
  c.cardinality_g = 2;
  c.bottleneck_width = 2;
  c.marx_blocks = 1;
  c.see_blocks = 1;
  c.reduction_ratio = 2;
  c.input_n = 16;
  return c;
}

SynthConfig toy_synth() {
  SynthConfig s;
  s.n = 16;
  s.k_olus = 4;
  s.decay_cells = 4;
  return s;
}

std::vector<Sample> toy_samples(std::initializer_list<const char*> names) {
  const auto cfg = toy_synth();
  const auto fp = synth_footprint(cfg);
  std::vector<Sample> out;
  for (const char* n : names) out.push_back(generate(decode_scenario(n, 4), cfg, fp));
  return out;
}

TrainConfig quick(int epochs, std::uint64_t seed = 3) {
  TrainConfig t;
  t.epochs = epochs;
  t.seed = seed;
  t.early_stop_patience = 0;
  t.adam.lr = 3e-3;
  return t;
}

TEST(Adam, SingleStepMatchesClosedForm) {
  nn::ParamStore<double> p;
  p.add("x", {1});
  p[0].value.data[0] = 2.0;
  const double g = 0.37;
  p[0].grad.data[0] = g;
  AdamConfig cfg;
  cfg.lr = 0.01;
  Adam<double> opt(cfg);
  opt.step(p);
  const double m = 0.1 * g / (1 - 0.9), v = 0.001 * g * g / (1 - 0.999);
  EXPECT_NEAR(p[0].value.data[0], 2.0 - 0.01 * m / (std::sqrt(v) + 1e-8), 1e-12);

  p[0].grad.data[0] = -1.5;
  const double before = p[0].value.data[0];
  opt.step(p);
  const double m2 = 0.9 * 0.1 * g + 0.1 * -1.5;
  const double v2 = 0.999 * 0.001 * g * g + 0.001 * 2.25;
  const double mh = m2 / (1 - 0.81), vh = v2 / (1 - 0.999 * 0.999);
  EXPECT_NEAR(p[0].value.data[0], before - 0.01 * mh / (std::sqrt(vh) + 1e-8), 1e-12);
  EXPECT_EQ(opt.steps(), 2);
}

TEST(Training, ZeroLearningRateLeavesParametersUnchanged) {
  const auto data = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0"});
  nn::Network<float> net(toy_model(), 1);
  const auto before = net.params();
  auto cfg = quick(3);
  cfg.adam.lr = 0.0;
  train(net, data, {}, LossConfig{}, cfg);
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_EQ(net.params()[k].value.data, before[k].value.data);
}

TEST(Training, SameSeedGivesIdenticalCurvesAndParameters) {
  const auto data = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0", "1111_1.5", "0000_1.0"});
  const auto val = toy_samples({"1100_1.0"});
  auto run = [&] {
    nn::Network<float> net(toy_model(), 9);
    const auto r = train(net, data, val, LossConfig{}, quick(4));
    return std::make_pair(r, params_to_container(net.config(), net.params()).serialize());
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.first.history.size(), b.first.history.size());
  for (std::size_t k = 0; k < a.first.history.size(); ++k) {
    EXPECT_EQ(a.first.history[k].train_loss, b.first.history[k].train_loss);
    EXPECT_EQ(a.first.history[k].val_loss, b.first.history[k].val_loss);
  }
  EXPECT_EQ(a.second, b.second);
}

TEST(Training, LossDecreasesOnToyData) {
  const auto data = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0", "0000_1.5"});
  nn::Network<float> net(toy_model(), 2);
  const auto r = train(net, data, {}, LossConfig{}, quick(30));
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
}

TEST(Training, EarlyStoppingKeepsBestValidationParameters) {
  const auto data = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0", "1111_1.5"});
  const auto val = toy_samples({"1100_1.5", "0011_1.0"});
  nn::Network<float> net(toy_model(), 4);
  auto cfg = quick(40);
  cfg.adam.lr = 0.05;
  cfg.early_stop_patience = 3;
  const auto r = train(net, data, val, LossConfig{}, cfg);
  double best = 1e300;
  for (const auto& h : r.history) best = std::min(best, h.val_loss);
  EXPECT_EQ(r.best_val_loss, best);
  EXPECT_EQ(validation_loss(net, val, LossConfig{}, cfg.batch_size).first, best);
  if (r.stopped_early) EXPECT_EQ(static_cast<int>(r.history.size()), r.best_epoch + 1 + cfg.early_stop_patience);
}

TEST(Training, NonFiniteLossAbortsWithDiagnostic) {
  auto data = toy_samples({"1010_1.0", "0110_1.5"});
  data[1].output.storage()[5] = std::nanf("");
  nn::Network<float> net(toy_model(), 4);
  try {
    train(net, data, {}, LossConfig{}, quick(2));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("huber"), std::string::npos) << msg;
  }
}

TEST(Training, RejectsMismatchedSizesAndEmptySets) {
  nn::Network<float> net(toy_model(), 4);
  SynthConfig big = toy_synth();
  big.n = 32;
  std::vector<Sample> wrong = {generate(decode_scenario("1010_1.0", 4), big)};
  EXPECT_THROW(train(net, wrong, {}, LossConfig{}, quick(1)), ShapeError);
  std::vector<Sample> none;
  EXPECT_THROW(train(net, none, {}, LossConfig{}, quick(1)), Error);
  const auto old = toy_samples({"1010_1.0"});
  EXPECT_THROW(finetune(net, none, old, {}, LossConfig{}, quick(1), CurriculumConfig{}), Error);
}

TEST(Curriculum, FractionSchedule) {
  CurriculumConfig c;
  EXPECT_DOUBLE_EQ(c.fraction(0, 100), 0.3);
  EXPECT_DOUBLE_EQ(c.fraction(99, 100), 0.7);
  EXPECT_DOUBLE_EQ(c.fraction(0, 3), 0.3);
  EXPECT_DOUBLE_EQ(c.fraction(1, 3), 0.5);
  EXPECT_DOUBLE_EQ(c.fraction(2, 3), 0.7);
  CurriculumConfig bad;
  bad.start_new_frac = 0.8;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Curriculum, SlotCompositionWithinThreeSigma) {
  CurriculumConfig c;
  const int count = 4000, epochs = 10;
  for (int e = 0; e < epochs; ++e) {
    const auto slots = curriculum_slots(e, epochs, count, c, 17);
    const double f = c.fraction(e, epochs);
    const double hits = static_cast<double>(std::count(slots.begin(), slots.end(), true));
    const double sigma = std::sqrt(count * f * (1 - f));
    EXPECT_LE(std::abs(hits - count * f), 3 * sigma) << "epoch " << e;
  }
}

TEST(Curriculum, FinetuneRunsAndRecordsFractions) {
  const auto old = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0"});
  const auto fresh = toy_samples({"1100_2.0", "0011_2.0"});
  nn::Network<float> net(toy_model(), 5);
  auto cfg = quick(3);
  const auto r = finetune(net, fresh, old, fresh, LossConfig{}, cfg, CurriculumConfig{});
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_DOUBLE_EQ(r.history[0].new_fraction, 0.3);
  EXPECT_DOUBLE_EQ(r.history[1].new_fraction, 0.5);
  EXPECT_DOUBLE_EQ(r.history[2].new_fraction, 0.7);
}

TEST(Ensemble, ConfigGuards) {
  EnsembleConfig one;
  one.members = 1;
  EXPECT_THROW(one.validate(), ConfigError);
  EnsembleConfig dup;
  dup.members = 2;
  dup.seeds = {4, 4};
  EXPECT_THROW(dup.validate(), ConfigError);
  EnsembleConfig count;
  count.members = 3;
  count.seeds = {1, 2};
  EXPECT_THROW(count.validate(), ConfigError);
  EXPECT_EQ(EnsembleConfig{}.resolved_seeds(7).size(), 5u);
}

TEST(Ensemble, StatisticsOfSimpleMembers) {
  Grid a(3, std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f, 0.8f, 0.9f});
  std::vector<Grid> same(5, a);
  const auto u = ensemble_stats(same);
  EXPECT_EQ(u.mean, a);
  for (float v : u.stddev.values()) EXPECT_EQ(v, 0.0f);
  Grid b = a;
  for (auto& v : b.storage()) v += 1.0f;
  const auto pair = ensemble_stats(std::vector<Grid>{a, b});
  for (float v : pair.stddev.values()) EXPECT_NEAR(v, 0.5f, 1e-6f);
  EXPECT_THROW(ensemble_stats(std::vector<Grid>{a}), Error);
  EXPECT_THROW(ensemble_stats(std::vector<Grid>{a, Grid(4)}), ShapeError);
}

TEST(Ensemble, IdenticalNetworksGiveZeroSpread) {
  nn::Network<float> net(toy_model(), 8);
  std::vector<nn::Network<float>> members(3, net);
  const auto data = toy_samples({"1010_1.5"});
  const auto u = predict_with_uncertainty(members, data[0].input, 1.5);
  EXPECT_EQ(u.mean, predict_grid(net, data[0].input, 1.5));
  for (float v : u.stddev.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Ensemble, MembersAreOrderIndependent) {
  const auto data = toy_samples({"1010_1.0", "0110_1.5", "0001_1.0"});
  EnsembleConfig ec;
  ec.members = 2;
  ec.seeds = {11, 12};
  const auto members = train_ensemble(toy_model(), data, {}, LossConfig{}, quick(2), ec);
  ASSERT_EQ(members.size(), 2u);
  nn::Network<float> alone(toy_model(), 12);
  train(alone, data, {}, LossConfig{}, quick(2, 12));
  for (std::size_t k = 0; k < alone.params().size(); ++k) {
    EXPECT_EQ(alone.params()[k].value.data, members[1].net.params()[k].value.data);
  }
}

TEST(GradCam, RangeLayersAndGuards) {
  nn::Network<float> net(toy_model(), 6);
  const auto data = toy_samples({"0000_1.5"});
  for (const auto& layer : gradcam_layers(net.config())) {
    const auto h = grad_cam(net, data[0].input, 1.5, layer);
    ASSERT_EQ(h.n(), 16);
    for (float v : h.values()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
  EXPECT_THROW(grad_cam(net, data[0].input, 1.5, "fr9"), NotFoundError);
  auto& ps = net.params();
  for (auto& v : ps[ps.index("head.conv.w")].value.data) v = 0.0f;
  for (auto& v : ps[ps.index("head.slr.w")].value.data) v = 0.0f;
  ps[ps.index("head.conv.b")].value.data[0] = -1.0f;
  const auto flat = grad_cam(net, data[0].input, 1.5);
  for (float v : flat.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Checkpoint, DirectoryRoundTrip) {
  const auto dir = fs::temp_directory_path() / "coastsurr_ckpt_test";
  fs::remove_all(dir);
  nn::Network<float> net(toy_model(), 6);
  TrainResult r;
  r.history.push_back(EpochRecord{0, 1.0, 0.5, 0.1, 0.3, 0.0, 0.0});
  save_checkpoint(dir / "one", net, {{"slr_levels", {1.0, 1.5}}}, &r);
  const auto back = load_checkpoint(dir / "one");
  const auto x = toy_samples({"0101_1.0"})[0].input;
  EXPECT_EQ(predict_grid(back, x, 1.0), predict_grid(net, x, 1.0));
  EXPECT_EQ(read_checkpoint_config(dir / "one")["slr_levels"].size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "one" / "history.csv"));
  EXPECT_THROW(load_checkpoint(dir / "missing"), NotFoundError);

  save_checkpoint(dir / "ens" / "member_0", net);
  save_checkpoint(dir / "ens" / "member_1", back);
  write_ensemble_index(dir / "ens", {1, 2});
  EXPECT_TRUE(is_ensemble_dir(dir / "ens"));
  EXPECT_EQ(load_ensemble(dir / "ens").size(), 2u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace coastsurr
