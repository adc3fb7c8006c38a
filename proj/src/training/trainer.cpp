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
#include "coastsurr/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/numerics.hpp"
#include "coastsurr/core/random.hpp"

namespace coastsurr {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (early_stop_patience < 0) throw ConfigError("train.early_stop_patience must be non-negative");
  adam.validate();
}

json TrainConfig::to_json() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"lr", adam.lr},
          {"beta1", adam.beta1},
          {"beta2", adam.beta2},
          {"epsilon", adam.epsilon},
          {"early_stop_patience", early_stop_patience},
          {"seed", seed},
          {"checkpoint_dir", checkpoint_dir}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  TrainConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "epochs") c.epochs = v.get<int>();
      else if (key == "batch_size") c.batch_size = v.get<int>();
      else if (key == "lr") c.adam.lr = v.get<double>();
      else if (key == "beta1") c.adam.beta1 = v.get<double>();
      else if (key == "beta2") c.adam.beta2 = v.get<double>();
      else if (key == "epsilon") c.adam.epsilon = v.get<double>();
      else if (key == "early_stop_patience") c.early_stop_patience = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "checkpoint_dir") c.checkpoint_dir = v.get<std::string>();
      else throw ConfigError("unknown key 'train." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("train." + key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

void CurriculumConfig::validate() const {
  if (!(start_new_frac >= 0.0 && start_new_frac <= end_new_frac && end_new_frac <= 1.0)) {
    throw ConfigError("curriculum requires 0 <= start_new_frac <= end_new_frac <= 1");
  }
  if (samples_per_epoch < 0) throw ConfigError("curriculum.samples_per_epoch must be non-negative");
}

double CurriculumConfig::fraction(int epoch, int epochs) const {
  if (epochs <= 1) return start_new_frac;
  return start_new_frac + (end_new_frac - start_new_frac) * static_cast<double>(epoch) / (epochs - 1);
}

json CurriculumConfig::to_json() const {
  return {{"start_new_frac", start_new_frac},
          {"end_new_frac", end_new_frac},
          {"samples_per_epoch", samples_per_epoch}};
}

CurriculumConfig CurriculumConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("curriculum config must be a JSON object");
  CurriculumConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "start_new_frac") c.start_new_frac = v.get<double>();
      else if (key == "end_new_frac") c.end_new_frac = v.get<double>();
      else if (key == "samples_per_epoch") c.samples_per_epoch = v.get<int>();
      else throw ConfigError("unknown key 'curriculum." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("curriculum." + key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

Grid predict_grid(const nn::Network<float>& net, const Grid& input, double slr_m) {
  return nn::tensor_to_grid(net.predict(nn::grid_to_tensor(input), static_cast<float>(slr_m)));
}

namespace {

using Batch = std::vector<const Sample*>;

void check_set(const nn::Network<float>& net, std::span<const Sample> set, const char* what) {
  for (const auto& s : set) {
    if (s.input.n() != net.config().input_n || s.output.n() != net.config().input_n) {
      throw ShapeError(std::string(what) + " sample '" + s.scenario_id + "' is " + std::to_string(s.input.n()) +
                       "x" + std::to_string(s.input.n()) + ", model expects " +
                       std::to_string(net.config().input_n));
    }
  }
}

/// Forward, loss and (optionally) backward over one batch.
LossValue run_batch(nn::Network<float>& net, const Batch& batch, const LossConfig& loss, bool with_grad,
                    std::vector<Grid>* preds = nullptr) {
  std::vector<std::unique_ptr<nn::Tape<float>>> tapes;
  std::vector<nn::Var> outs;
  std::vector<double> pred, truth;
  for (const Sample* s : batch) {
    tapes.push_back(std::make_unique<nn::Tape<float>>(with_grad));
    auto& tape = *tapes.back();
    const auto tr = with_grad ? net.forward(tape, nn::grid_to_tensor(s->input), static_cast<float>(s->slr_m), true,
                                            false, true)
                              : net.trace(tape, nn::grid_to_tensor(s->input), static_cast<float>(s->slr_m));
    outs.push_back(tr.output);
    const auto& y = tape.value(tr.output);
    pred.insert(pred.end(), y.data.begin(), y.data.end());
    const auto t = s->output.values();
    truth.insert(truth.end(), t.begin(), t.end());
    if (preds) preds->push_back(nn::tensor_to_grid(y));
  }
  std::vector<double> grad;
  const LossValue lv = hybrid_loss(pred, truth, loss, with_grad ? &grad : nullptr);
  if (with_grad) {
    std::size_t offset = 0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto& y = tapes[b]->value(outs[b]);
      nn::Tensor<float> seed(y.shape);
      for (std::size_t k = 0; k < seed.size(); ++k) seed.data[k] = static_cast<float>(grad[offset + k]);
      offset += seed.size();
      tapes[b]->backward(outs[b], seed);
    }
  }
  return lv;
}

std::string describe(const LossValue& lv) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "total %g (huber %g, log_cosh %g, quantile %g, delta %g)", lv.total, lv.huber,
                lv.log_cosh, lv.quantile, lv.delta);
  return buf;
}

using EpochPlan = std::function<std::vector<Batch>(int epoch, double* new_fraction)>;

TrainResult run_training(nn::Network<float>& net, std::span<const Sample> val_set, const LossConfig& loss,
                         const TrainConfig& cfg, const EpochPlan& plan, const EpochCallback& on_epoch) {
  Adam<float> opt(cfg.adam);
  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  nn::ParamStore<float> best = net.params();
  int wait = 0;
  for (int e = 0; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = e;
    const auto batches = plan(e, &rec.new_fraction);
    std::vector<double> losses, deltas;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      net.params().zero_grad();
      const LossValue lv = run_batch(net, batches[b], loss, true);
      if (!std::isfinite(lv.total)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(e) + ", batch " + std::to_string(b) +
                           ": " + describe(lv));
      }
      opt.step(net.params());
      if (!net.params().all_finite()) {
        throw NumericError("non-finite parameters after epoch " + std::to_string(e) + ", batch " +
                           std::to_string(b) + ": " + describe(lv));
      }
      losses.push_back(lv.total);
      deltas.push_back(lv.delta);
    }
    rec.train_loss = pairwise_sum(losses) / static_cast<double>(losses.size());
    rec.mean_delta = pairwise_sum(deltas) / static_cast<double>(deltas.size());
    if (!val_set.empty()) {
      std::tie(rec.val_loss, rec.val_amae) = validation_loss(net, val_set, loss, cfg.batch_size);
    } else {
      rec.val_loss = rec.train_loss;
      rec.val_amae = std::numeric_limits<double>::quiet_NaN();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_loss < result.best_val_loss) {
      result.best_val_loss = rec.val_loss;
      result.best_epoch = e;
      best = net.params();
      wait = 0;
    } else if (cfg.early_stop_patience > 0 && ++wait >= cfg.early_stop_patience) {
      result.stopped_early = true;
      break;
    }
  }
  for (std::size_t k = 0; k < best.size(); ++k) net.params()[k].value = best[k].value;
  net.params().zero_grad();
  return result;
}

}  // namespace

std::pair<double, double> validation_loss(const nn::Network<float>& net, std::span<const Sample> set,
                                          const LossConfig& loss, int batch_size) {
  if (set.empty()) throw Error("validation set is empty");
  auto& mut = const_cast<nn::Network<float>&>(net);
  std::vector<double> losses, abs_err;
  for (std::size_t start = 0; start < set.size(); start += static_cast<std::size_t>(batch_size)) {
    Batch batch;
    for (std::size_t k = start; k < std::min(set.size(), start + batch_size); ++k) batch.push_back(&set[k]);
    std::vector<Grid> preds;
    losses.push_back(run_batch(mut, batch, loss, false, &preds).total);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto p = preds[b].values();
      const auto t = batch[b]->output.values();
      std::vector<double> e(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) e[k] = std::abs(static_cast<double>(p[k]) - t[k]);
      abs_err.push_back(pairwise_sum(e) / static_cast<double>(e.size()));
    }
  }
  return {pairwise_sum(losses) / static_cast<double>(losses.size()),
          pairwise_sum(abs_err) / static_cast<double>(abs_err.size())};
}

TrainResult train(nn::Network<float>& net, std::span<const Sample> train_set, std::span<const Sample> val_set,
                  const LossConfig& loss, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  loss.validate();
  if (train_set.empty()) throw Error("training set is empty");
  check_set(net, train_set, "training");
  check_set(net, val_set, "validation");
  const EpochPlan plan = [&](int epoch, double* frac) {
    *frac = 0.0;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed, static_cast<std::uint64_t>(epoch) + 1);
    rng.shuffle(order);
    std::vector<Batch> batches;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k % static_cast<std::size_t>(cfg.batch_size) == 0) batches.emplace_back();
      batches.back().push_back(&train_set[order[k]]);
    }
    return batches;
  };
  return run_training(net, val_set, loss, cfg, plan, on_epoch);
}

std::vector<bool> curriculum_slots(int epoch, int epochs, int count, const CurriculumConfig& c, std::uint64_t seed) {
  Rng rng(seed, 0xC0FFEE00ULL + static_cast<std::uint64_t>(epoch));
  const double f = c.fraction(epoch, epochs);
  std::vector<bool> slots(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) slots[k] = rng.bernoulli(f);
  return slots;
}

TrainResult finetune(nn::Network<float>& net, std::span<const Sample> new_set, std::span<const Sample> old_set,
                     std::span<const Sample> val_set, const LossConfig& loss, const TrainConfig& cfg,
                     const CurriculumConfig& curriculum, const EpochCallback& on_epoch) {
  cfg.validate();
  loss.validate();
  curriculum.validate();
  if (new_set.empty()) throw Error("fine-tuning needs at least one new-data sample");
  check_set(net, new_set, "new-data");
  check_set(net, old_set, "replay");
  check_set(net, val_set, "validation");
  const int per_epoch =
      curriculum.samples_per_epoch > 0 ? curriculum.samples_per_epoch : 2 * static_cast<int>(new_set.size());

  // Cycling permutations so every pool member is visited before repeats.
  struct Pool {
    std::span<const Sample> set;
    std::vector<std::size_t> order;
    std::size_t pos = 0;
    Rng rng;
    const Sample* next() {
      if (pos == order.size()) {
        rng.shuffle(order);
        pos = 0;
      }
      return &set[order[pos++]];
    }
  };
  auto make_pool = [&](std::span<const Sample> set, std::uint64_t stream) {
    Pool p{set, std::vector<std::size_t>(set.size()), set.size(), Rng(cfg.seed, stream)};
    std::iota(p.order.begin(), p.order.end(), std::size_t{0});
    return p;
  };
  Pool fresh = make_pool(new_set, 0xF1), replay = make_pool(old_set, 0xF2);

  const EpochPlan plan = [&](int epoch, double* frac) {
    *frac = curriculum.fraction(epoch, cfg.epochs);
    const auto slots = curriculum_slots(epoch, cfg.epochs, per_epoch, curriculum, cfg.seed);
    std::vector<Batch> batches;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (k % static_cast<std::size_t>(cfg.batch_size) == 0) batches.emplace_back();
      const bool use_new = slots[k] || old_set.empty();
      batches.back().push_back(use_new ? fresh.next() : replay.next());
    }
    return batches;
  };
  return run_training(net, val_set, loss, cfg, plan, on_epoch);
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_loss,val_amae,mean_delta,new_fraction\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.6g,%.6g\n", r.epoch, r.train_loss, r.val_loss, r.val_amae,
                  r.mean_delta, r.new_fraction);
    out += buf;
  }
  return out;
}

}  // namespace coastsurr
