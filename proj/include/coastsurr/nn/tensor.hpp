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

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace coastsurr::nn {

/// Dense row-major array. Feature maps use the [C, H, W] layout; vectors are
/// rank 1.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, T fill = T(0)) : shape(std::move(s)), data(count(shape), fill) {}
  Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {}

  static std::size_t count(const std::vector<int>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  }

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }
  int dim(std::size_t k) const { return shape.at(k); }
  int rank() const noexcept { return static_cast<int>(shape.size()); }

  // [C, H, W] accessors
  int channels() const { return shape.at(0); }
  int height() const { return shape.at(1); }
  int width() const { return shape.at(2); }
  T& at(int c, int h, int w) { return data[(static_cast<std::size_t>(c) * shape[1] + h) * shape[2] + w]; }
  T at(int c, int h, int w) const {
    return data[(static_cast<std::size_t>(c) * shape[1] + h) * shape[2] + w];
  }

  T* ptr() noexcept { return data.data(); }
  const T* ptr() const noexcept { return data.data(); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

std::string shape_string(const std::vector<int>& shape);

}  // namespace coastsurr::nn
