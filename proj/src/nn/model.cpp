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
#include "coastsurr/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "coastsurr/core/errors.hpp"

namespace coastsurr::nn {

using nlohmann::json;

std::string slr_mode_name(SlrMode m) {
  switch (m) {
    case SlrMode::kNone: return "none";
    case SlrMode::kBottleneck: return "bottleneck";
    case SlrMode::kFr: return "fr";
    case SlrMode::kEnd: return "end";
    case SlrMode::kSeeEnd: return "see_end";
  }
  return "see_end";
}

SlrMode slr_mode_from_name(const std::string& name) {
  if (name == "none") return SlrMode::kNone;
  if (name == "bottleneck") return SlrMode::kBottleneck;
  if (name == "fr") return SlrMode::kFr;
  if (name == "end") return SlrMode::kEnd;
  if (name == "see_end") return SlrMode::kSeeEnd;
  throw ConfigError("unknown slr_mode '" + name + "' (expected none, bottleneck, fr, end or see_end)");
}

int ModelConfig::encoder_width(int level) const {
  if (level <= 0) return 1;
  return base_channels << (level - 1);
}

void ModelConfig::validate() const {
  if (depth_k < 1 || depth_k > 8) throw ConfigError("model.depth_k must lie in 1..8");
  if (base_channels < 2) throw ConfigError("model.base_channels must be at least 2");
  if (cardinality_g < 1 || bottleneck_width < 1) {
    throw ConfigError("model.cardinality_g and model.bottleneck_width must be positive");
  }
  if (marx_blocks < 0) throw ConfigError("model.marx_blocks must be non-negative");
  if (see_blocks < 0 || see_blocks > depth_k) throw ConfigError("model.see_blocks must lie in 0..depth_k");
  if (reduction_ratio < 1) throw ConfigError("model.reduction_ratio must be positive");
  if (activation != "relu") throw ConfigError("model.activation must be 'relu'");
  if (!(slr_scale > 0.0)) throw ConfigError("model.slr_scale must be positive");
  const int step = 1 << depth_k;
  if (input_n < step || input_n % step != 0) {
    throw ConfigError("model.input_n = " + std::to_string(input_n) + " is not divisible by 2^depth_k = " +
                      std::to_string(step));
  }
  if (marx_blocks > 0 && encoder_width(depth_k) % cardinality_g != 0) {
    throw ConfigError("bottleneck width F = " + std::to_string(encoder_width(depth_k)) +
                      " is not divisible by cardinality G = " + std::to_string(cardinality_g));
  }
}

json ModelConfig::to_json() const {
  return {{"depth_k", depth_k},
          {"base_channels", base_channels},
          {"cardinality_g", cardinality_g},
          {"bottleneck_width", bottleneck_width},
          {"marx_blocks", marx_blocks},
          {"see_blocks", see_blocks},
          {"slr_mode", slr_mode_name(slr_mode)},
          {"reduction_ratio", reduction_ratio},
          {"activation", activation},
          {"input_n", input_n},
          {"slr_scale", slr_scale}};
}

ModelConfig ModelConfig::from_json(const json& j) {
  ModelConfig c;
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "depth_k") c.depth_k = v.get<int>();
      else if (key == "base_channels") c.base_channels = v.get<int>();
      else if (key == "cardinality_g") c.cardinality_g = v.get<int>();
      else if (key == "bottleneck_width") c.bottleneck_width = v.get<int>();
      else if (key == "marx_blocks") c.marx_blocks = v.get<int>();
      else if (key == "see_blocks") c.see_blocks = v.get<int>();
      else if (key == "slr_mode") c.slr_mode = slr_mode_from_name(v.get<std::string>());
      else if (key == "reduction_ratio") c.reduction_ratio = v.get<int>();
      else if (key == "activation") c.activation = v.get<std::string>();
      else if (key == "input_n") c.input_n = v.get<int>();
      else if (key == "slr_scale") c.slr_scale = v.get<double>();
      else throw ConfigError("unknown key 'model." + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("model." + key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

template <typename T>
std::size_t ParamStore<T>::add(std::string name, std::vector<int> shape) {
  if (by_name_.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
  Param<T> p;
  p.name = name;
  p.value = Tensor<T>(shape);
  p.grad = Tensor<T>(shape);
  params_.push_back(std::move(p));
  by_name_[name] = params_.size() - 1;
  return params_.size() - 1;
}

template <typename T>
std::size_t ParamStore<T>::index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw NotFoundError("no parameter named '" + name + "'");
  return it->second;
}

template <typename T>
std::size_t ParamStore<T>::count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.data.begin(), p.grad.data.end(), T(0));
}

template <typename T>
bool ParamStore<T>::all_finite() const noexcept {
  for (const auto& p : params_) {
    for (T v : p.value.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

int pool_factor_to_at_most(int size, int limit) {
  for (int p = 1; p <= size; ++p) {
    if (size % p == 0 && size / p <= limit) return p;
  }
  return size;
}

namespace {

struct Level {
  int up_channels;
  int skip_channels;
  int size;  // spatial edge after upsampling
};

std::vector<Level> decoder_levels(const ModelConfig& c) {
  std::vector<Level> out;
  for (int k = 1; k <= c.depth_k; ++k) {
    const int enc_level = c.depth_k - k;
    Level l;
    l.up_channels = enc_level > 0 ? c.encoder_width(enc_level) : c.base_channels;
    l.skip_channels = c.encoder_width(enc_level);
    l.size = c.input_n >> enc_level;
    out.push_back(l);
  }
  return out;
}

int see_features(const ModelConfig& c, const Level& l) {
  const int side = l.size / pool_factor_to_at_most(l.size, 4);
  return l.skip_channels * side * side;
}

int see_gate_side(const Level& l) { return l.size / pool_factor_to_at_most(l.size, 8); }

constexpr int kSeeUnits = 16;

/// He gain for layers followed by a ReLU; unit gain for layers that feed a
/// residual sum, a concatenation or a sigmoid.
double init_gain(const std::string& name) {
  for (const char* tag : {".a.w", ".g.w", ".conv.w", ".ca.fc1.w"}) {
    const std::string t(tag);
    if (name.size() >= t.size() && name.compare(name.size() - t.size(), t.size(), t) == 0) {
      return name.rfind("marx", 0) == 0 && t == ".conv.w" ? 1.0 : 2.0;
    }
  }
  return 1.0;
}

}  // namespace

template <typename T>
void Network<T>::declare(ParamStore<T>& s) const {
  const ModelConfig& c = cfg_;
  auto conv = [&](const std::string& name, int cout, int cin_g, int k) {
    s.add(name + ".w", {cout, cin_g, k, k});
    s.add(name + ".b", {cout});
  };
  auto dense = [&](const std::string& name, int out, int in) {
    s.add(name + ".w", {out, in});
    s.add(name + ".b", {out});
  };
  for (int k = 1; k <= c.depth_k; ++k) {
    const std::string p = "fe" + std::to_string(k);
    const int cin = c.encoder_width(k - 1), cout = c.encoder_width(k);
    conv(p + ".dw", cin, 1, 2);
    conv(p + ".pw", cout - cin, cin, 1);
    conv(p + ".proj", cout, cin, 1);
  }
  const int f = c.encoder_width(c.depth_k);
  const int fg = c.group_width();
  const int hidden = std::max(1, f / c.reduction_ratio);
  for (int m = 1; m <= c.marx_blocks; ++m) {
    const std::string p = "marx" + std::to_string(m);
    for (int r = 1; r <= 2; ++r) {
      const std::string q = p + ".rx" + std::to_string(r);
      conv(q + ".a", fg, f, 1);
      conv(q + ".g", fg, fg / c.cardinality_g, 3);
      conv(q + ".c", f, fg, 1);
    }
    dense(p + ".ca.fc1", hidden, f);
    dense(p + ".ca.fc2", f, hidden);
    conv(p + ".sa.conv", 1, 1, 7);
  }
  if (c.slr_mode == SlrMode::kBottleneck) dense("slr.bottleneck", f, 1);
  const auto levels = decoder_levels(c);
  int prev = f;
  for (int k = 1; k <= c.depth_k; ++k) {
    const Level& l = levels[k - 1];
    const std::string p = "fr" + std::to_string(k);
    s.add(p + ".up.w", {prev, l.up_channels, 2, 2});
    s.add(p + ".up.b", {l.up_channels});
    conv(p + ".conv", l.up_channels, l.up_channels + l.skip_channels, 3);
    if (c.slr_mode == SlrMode::kFr) dense(p + ".slr", l.up_channels, 1);
    if (k <= c.see_blocks) {
      const std::string q = "see" + std::to_string(k);
      dense(q + ".sp", kSeeUnits, see_features(c, l));
      if (c.slr_in_see()) dense(q + ".slr", kSeeUnits, 1);
      const int g = see_gate_side(l);
      dense(q + ".comb", g * g, c.slr_in_see() ? 2 * kSeeUnits : kSeeUnits);
    }
    prev = l.up_channels;
  }
  conv("head.conv", 1, prev, 3);
  if (c.slr_at_head()) dense("head.slr", prev, 1);
}

template <typename T>
Network<T>::Network(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  declare(params_);
  Rng rng(seed, 0xBEEF);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k];
    if (p.name.size() >= 2 && p.name.compare(p.name.size() - 2, 2, ".b") == 0) continue;
    int fan_in = 1;
    const auto& sh = p.value.shape;
    if (p.name.find(".up.") != std::string::npos) {
      fan_in = sh[0];
    } else {
      for (std::size_t d = 1; d < sh.size(); ++d) fan_in *= sh[d];
    }
    const double sd = std::sqrt(init_gain(p.name) / std::max(1, fan_in));
    for (auto& v : p.value.data) v = static_cast<T>(sd * rng.normal());
  }
}

template <typename T>
Network<T>::Network(const ModelConfig& cfg, ParamStore<T> params) : cfg_(cfg) {
  cfg_.validate();
  ParamStore<T> expected;
  declare(expected);
  if (expected.size() != params.size()) {
    throw ShapeError("parameter set has " + std::to_string(params.size()) + " tensors, config expects " +
                     std::to_string(expected.size()));
  }
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto& want = expected[k];
    if (!params.has(want.name)) throw ShapeError("missing parameter '" + want.name + "'");
    const auto& got = params[params.index(want.name)];
    if (got.value.shape != want.value.shape) {
      throw ShapeError("parameter '" + want.name + "' has shape " + shape_string(got.value.shape) +
                       ", config expects " + shape_string(want.value.shape));
    }
    expected[k].value = got.value;
  }
  if (!expected.all_finite()) throw NumericError("parameters contain non-finite values");
  params_ = std::move(expected);
}

template <typename T>
ForwardTrace Network<T>::forward(Tape<T>& tape, const Tensor<T>& input, T slr_m, bool param_grads,
                                 bool slr_grad, bool revive_output) {
  return build(tape, input, slr_m, param_grads, slr_grad, false, revive_output);
}

template <typename T>
ForwardTrace Network<T>::trace(Tape<T>& tape, const Tensor<T>& input, T slr_m) const {
  return build(tape, input, slr_m, false, false);
}

template <typename T>
ForwardTrace Network<T>::attribution(Tape<T>& tape, const Tensor<T>& input, T slr_m) const {
  return build(tape, input, slr_m, false, true, true);
}

template <typename T>
Tensor<T> Network<T>::predict(const Tensor<T>& input, T slr_m) const {
  Tape<T> tape(false);
  const auto tr = build(tape, input, slr_m, false, false);
  return tape.value(tr.output);
}

template <typename T>
ForwardTrace Network<T>::build(Tape<T>& tape, const Tensor<T>& input, T slr_m, bool param_grads,
                               bool slr_grad, bool input_grad, bool revive_output) const {
  const ModelConfig& c = cfg_;
  if (input.rank() != 3 || input.channels() != 1 || input.height() != c.input_n ||
      input.width() != c.input_n) {
    throw ShapeError("network expects input [1, " + std::to_string(c.input_n) + ", " +
                     std::to_string(c.input_n) + "], got " + shape_string(input.shape));
  }
  auto& store = const_cast<ParamStore<T>&>(params_);
  auto P = [&](const std::string& name) {
    auto& p = store[store.index(name)];
    return tape.parameter(p.value, param_grads ? &p.grad : nullptr);
  };
  auto conv = [&](Var x, const std::string& name, int stride, int pad, int groups = 1) {
    return tape.conv2d(x, P(name + ".w"), P(name + ".b"), stride, pad, groups);
  };
  auto dense = [&](Var v, const std::string& name) { return tape.dense(v, P(name + ".w"), P(name + ".b")); };

  ForwardTrace tr;
  const Var x0 = input_grad ? tape.input(input) : tape.constant(input);
  const T s_norm = static_cast<T>(static_cast<double>(slr_m) / c.slr_scale);
  tr.slr = slr_grad ? tape.input(Tensor<T>({1}, s_norm)) : tape.constant(Tensor<T>({1}, s_norm));

  std::vector<Var> skips = {x0};
  Var x = x0;
  for (int k = 1; k <= c.depth_k; ++k) {
    const std::string p = "fe" + std::to_string(k);
    const int cin = c.encoder_width(k - 1);
    const Var dw = conv(x, p + ".dw", 2, 0, cin);
    const Var pw = tape.relu(conv(dw, p + ".pw", 1, 0));
    const Var cat = tape.concat(pw, tape.avg_pool(x, 2));
    const Var proj = conv(x, p + ".proj", 2, 0);
    x = tape.relu(tape.add(cat, proj));
    tr.encoder_outputs.push_back(x);
    skips.push_back(x);
  }

  auto resnext = [&](Var in, const std::string& q) {
    Var h = tape.relu(conv(in, q + ".a", 1, 0));
    h = tape.relu(conv(h, q + ".g", 1, 1, c.cardinality_g));
    h = tape.relu(conv(h, q + ".c", 1, 0));
    return tape.relu(tape.add(in, h));
  };
  for (int m = 1; m <= c.marx_blocks; ++m) {
    const std::string p = "marx" + std::to_string(m);
    const Var r1 = resnext(x, p + ".rx1");
    const Var z = tape.global_avg_pool(r1);
    const Var mc = tape.sigmoid(dense(tape.relu(dense(z, p + ".ca.fc1")), p + ".ca.fc2"));
    const Var xc = tape.scale_channels(r1, mc);
    const Var ms = tape.sigmoid(conv(tape.channel_mean(xc), p + ".sa.conv", 1, 3));
    const Var xs = tape.block_gate(xc, ms);
    tr.channel_gates.push_back(mc);
    tr.spatial_gates.push_back(ms);
    x = resnext(xs, p + ".rx2");
    tr.marx_outputs.push_back(x);
  }
  if (c.slr_mode == SlrMode::kBottleneck) x = tape.add_channel_bias(x, dense(tr.slr, "slr.bottleneck"));

  const auto levels = decoder_levels(c);
  for (int k = 1; k <= c.depth_k; ++k) {
    const Level& l = levels[k - 1];
    const std::string p = "fr" + std::to_string(k);
    const Var skip = skips[static_cast<std::size_t>(c.depth_k - k)];
    const Var up = tape.conv_transpose2x2(x, P(p + ".up.w"), P(p + ".up.b"));
    Var h = conv(tape.concat(up, skip), p + ".conv", 1, 1);
    if (c.slr_mode == SlrMode::kFr) h = tape.add_channel_bias(h, dense(tr.slr, p + ".slr"));
    h = tape.relu(h);
    if (k <= c.see_blocks) {
      const std::string q = "see" + std::to_string(k);
      const Var pooled = tape.avg_pool(skip, pool_factor_to_at_most(l.size, 4));
      const Var w_sp = tape.sigmoid(dense(pooled, q + ".sp"));
      Var comb = w_sp;
      if (c.slr_in_see()) {
        const Var w_slr = dense(tr.slr, q + ".slr");
        comb = tape.concat(tape.reshape(w_sp, {kSeeUnits, 1, 1}), tape.reshape(w_slr, {kSeeUnits, 1, 1}));
      }
      const int g = see_gate_side(l);
      const Var w_see = tape.reshape(tape.sigmoid(dense(comb, q + ".comb")), {1, g, g});
      tr.see_gates.push_back(w_see);
      h = tape.block_gate(h, w_see);
    }
    tr.fr_outputs.push_back(h);
    x = h;
  }

  Var o = conv(x, "head.conv", 1, 1);
  if (c.slr_at_head()) {
    const Var w_end = dense(tr.slr, "head.slr");
    o = tape.add(o, tape.channel_weighted_sum(x, w_end));
  }
  tr.output = revive_output ? tape.relu_revive(o) : tape.relu(o);
  return tr;
}

Tensor<float> grid_to_tensor(const Grid& g) {
  const auto v = g.values();
  return Tensor<float>({1, g.n(), g.n()}, std::vector<float>(v.begin(), v.end()));
}

Grid tensor_to_grid(const Tensor<float>& t) {
  if (t.rank() != 3 || t.channels() != 1 || t.height() != t.width()) {
    throw ShapeError("expected a [1, n, n] tensor, got " + shape_string(t.shape));
  }
  return Grid(t.height(), t.data);
}

TensorContainer params_to_container(const ModelConfig& cfg, const ParamStore<float>& params) {
  TensorContainer c;
  c.metadata["kind"] = "model";
  c.metadata["format_version"] = 1;
  c.metadata["model"] = cfg.to_json();
  c.metadata["parameter_count"] = params.count();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    std::vector<std::int64_t> shape(p.value.shape.begin(), p.value.shape.end());
    c.add(p.name, shape, p.value.data);
  }
  return c;
}

Network<float> network_from_container(const TensorContainer& c) {
  if (c.metadata.value("kind", std::string()) != "model") throw ParseError("container is not a model checkpoint");
  if (c.metadata.value("format_version", 0) != 1) throw ParseError("unsupported model checkpoint version");
  const ModelConfig cfg = ModelConfig::from_json(c.metadata.at("model"));
  ParamStore<float> store;
  for (const auto& a : c.arrays()) {
    std::vector<int> shape(a.shape.begin(), a.shape.end());
    const auto k = store.add(a.name, shape);
    store[k].value.data = a.data;
  }
  return Network<float>(cfg, std::move(store));
}

template class ParamStore<float>;
template class ParamStore<double>;
template class Network<float>;
template class Network<double>;

}  // namespace coastsurr::nn
