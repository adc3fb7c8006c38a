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

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "coastsurr/core/random.hpp"
#include "coastsurr/core/tensor_container.hpp"
#include "coastsurr/core/types.hpp"
#include "coastsurr/nn/tape.hpp"

namespace coastsurr::nn {

/// Where the sea-level-rise scalar enters the network.
///   bottleneck  channel bias after the MARX stack
///   fr          channel bias in every decoder block
///   end         SLR-weighted channel sum at the output head
///   see_end     SEE gating plus the output-head channel sum
///   none        nowhere; the forward pass ignores SLR
enum class SlrMode { kNone, kBottleneck, kFr, kEnd, kSeeEnd };

std::string slr_mode_name(SlrMode m);
SlrMode slr_mode_from_name(const std::string& name);

struct ModelConfig {
  int depth_k = 4;
  int base_channels = 16;
  int cardinality_g = 8;
  int bottleneck_width = 4;
  int marx_blocks = 4;
  int see_blocks = 1;
  SlrMode slr_mode = SlrMode::kSeeEnd;
  int reduction_ratio = 8;
  std::string activation = "relu";
  int input_n = 64;
  double slr_scale = 2.0;

  /// Encoder width at level k (1..depth_k): base * 2^(k-1). Level 0 is the
  /// single-channel input.
  int encoder_width(int level) const;
  int group_width() const noexcept { return cardinality_g * bottleneck_width; }
  bool slr_in_see() const noexcept { return slr_mode == SlrMode::kSeeEnd; }
  bool slr_at_head() const noexcept {
    return slr_mode == SlrMode::kSeeEnd || slr_mode == SlrMode::kEnd;
  }

  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/// Ordered named tensors with matching gradient buffers.
template <typename T>
class ParamStore {
 public:
  std::size_t add(std::string name, std::vector<int> shape);
  std::size_t size() const noexcept { return params_.size(); }
  Param<T>& operator[](std::size_t k) { return params_[k]; }
  const Param<T>& operator[](std::size_t k) const { return params_[k]; }
  std::size_t index(const std::string& name) const;
  bool has(const std::string& name) const { return by_name_.count(name) != 0; }

  /// Total scalar count.
  std::size_t count() const noexcept;
  void zero_grad();
  bool all_finite() const noexcept;

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& p : params_) {
      const auto k = out.add(p.name, p.value.shape);
      out[k].value = p.value.template cast<U>();
    }
    return out;
  }

 private:
  std::deque<Param<T>> params_;
  std::map<std::string, std::size_t> by_name_;
};

/// Named activations recorded during one forward pass.
struct ForwardTrace {
  Var output = kNoVar;
  Var slr = kNoVar;
  std::vector<Var> encoder_outputs;  // E_1..E_K
  std::vector<Var> fr_outputs;       // D_1..D_K
  std::vector<Var> channel_gates;    // M_c per MARX block
  std::vector<Var> spatial_gates;    // M_s per MARX block
  std::vector<Var> marx_outputs;
  std::vector<Var> see_gates;        // w_see per SEE level
};

template <typename T>
class Network {
 public:
  /// He-normal weights and zero biases drawn from `seed`.
  Network(const ModelConfig& cfg, std::uint64_t seed);
  /// Adopts existing parameters; names and shapes must match the config.
  Network(const ModelConfig& cfg, ParamStore<T> params);

  const ModelConfig& config() const noexcept { return cfg_; }
  ParamStore<T>& params() noexcept { return params_; }
  const ParamStore<T>& params() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.count(); }

  /// Records the forward pass on `tape`. Input is [1, n, n]. With
  /// `param_grads`, backward() accumulates into params().grad; with
  /// `slr_grad`, the SLR scalar is a probe-able input node. With
  /// `revive_output`, the output clamp passes gradients that push a clamped
  /// pixel upward (the forward value is unchanged).
  ForwardTrace forward(Tape<T>& tape, const Tensor<T>& input, T slr_m, bool param_grads = true,
                       bool slr_grad = false, bool revive_output = false);
  /// Inference without gradients.
  Tensor<T> predict(const Tensor<T>& input, T slr_m) const;
  ForwardTrace trace(Tape<T>& tape, const Tensor<T>& input, T slr_m) const;
  /// Records a pass where activations receive gradients but parameters do
  /// not; used for attribution maps.
  ForwardTrace attribution(Tape<T>& tape, const Tensor<T>& input, T slr_m) const;

  template <typename U>
  Network<U> cast() const {
    return Network<U>(cfg_, params_.template cast<U>());
  }

 private:
  ForwardTrace build(Tape<T>& tape, const Tensor<T>& input, T slr_m, bool param_grads, bool slr_grad,
                     bool input_grad = false, bool revive_output = false) const;
  void declare(ParamStore<T>& store) const;

  ModelConfig cfg_;
  ParamStore<T> params_;
};

/// Feature-map geometry helpers shared with tests.
int pool_factor_to_at_most(int size, int limit);

Tensor<float> grid_to_tensor(const Grid& g);
Grid tensor_to_grid(const Tensor<float>& t);

/// Float32 parameter checkpoint: one array per parameter plus the model
/// config in the metadata.
TensorContainer params_to_container(const ModelConfig& cfg, const ParamStore<float>& params);
Network<float> network_from_container(const TensorContainer& c);

extern template class ParamStore<float>;
extern template class ParamStore<double>;
extern template class Network<float>;
extern template class Network<double>;

}  // namespace coastsurr::nn
