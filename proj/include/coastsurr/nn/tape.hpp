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

#include <deque>
#include <functional>
#include <vector>

#include "coastsurr/nn/tensor.hpp"

namespace coastsurr::nn {

using Var = int;
inline constexpr Var kNoVar = -1;

/// Reverse-mode autodiff over single-sample [C, H, W] activations.
///
/// Every op appends a node holding its value and, when recording, a closure
/// that pushes the node's gradient into its inputs. Parameter leaves
/// accumulate straight into caller-owned gradient buffers.
template <typename T>
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Leaf with no gradient.
  Var constant(Tensor<T> value);
  /// Leaf whose gradient is kept on the tape (e.g. an input to probe).
  Var input(Tensor<T> value);
  /// Leaf that reads `value` in place and accumulates into `grad` (which must
  /// match its shape). A null grad freezes the parameter.
  Var parameter(const Tensor<T>& value, Tensor<T>* grad);

  const Tensor<T>& value(Var v) const;
  /// Gradient accumulated by backward(); empty when the node received none.
  const Tensor<T>& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v).requires_grad; }

  /// Seeds d(objective)/d(out) and runs every closure in reverse order.
  void backward(Var out, const Tensor<T>& seed);

  // Ops. Weight layouts:
  //   conv2d            w [Cout, Cin/groups, kh, kw], b [Cout]
  //   conv_transpose2x2 w [Cin, Cout, 2, 2], b [Cout]
  //   dense             w [out, in], b [out]
  Var conv2d(Var x, Var w, Var b, int stride, int pad, int groups = 1);
  Var conv_transpose2x2(Var x, Var w, Var b);
  Var avg_pool(Var x, int k);
  Var relu(Var x);
  /// ReLU whose backward also passes gradients that would raise a clamped
  /// unit (negative upstream gradient at y = 0).
  Var relu_revive(Var x);
  Var sigmoid(Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var concat(Var a, Var b);
  /// x[c, h, w] * s[c]
  Var scale_channels(Var x, Var s);
  /// x[c, h, w] + v[c]
  Var add_channel_bias(Var x, Var v);
  /// x[c, h, w] * g[0, h / bh, w / bw] with g of shape [1, gh, gw] dividing H, W.
  Var block_gate(Var x, Var g);
  /// [C, H, W] -> [C]
  Var global_avg_pool(Var x);
  /// [C, H, W] -> [1, H, W]
  Var channel_mean(Var x);
  /// Treats v as a flat vector of length `in`.
  Var dense(Var v, Var w, Var b);
  /// sum_c x[c, h, w] * w[c] -> [1, H, W]
  Var channel_weighted_sum(Var x, Var w);
  Var reshape(Var x, std::vector<int> shape);

 private:
  struct Node {
    Tensor<T> value;
    const Tensor<T>* ref = nullptr;
    Tensor<T> grad;
    Tensor<T>* ext_grad = nullptr;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var push(Tensor<T> value, bool requires_grad);
  bool any_grad(std::initializer_list<Var> vs) const;
  Tensor<T>& grad_buffer(Var v);
  Tensor<T>& own_grad(Var v) { return nodes_[v].grad; }

  bool record_;
  std::deque<Node> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace coastsurr::nn
