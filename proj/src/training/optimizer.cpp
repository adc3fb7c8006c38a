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
#include "coastsurr/training/optimizer.hpp"

#include <cmath>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {

void AdamConfig::validate() const {
  if (!(lr >= 0.0)) throw ConfigError("train.lr must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("train.epsilon must be positive");
}

template <typename T>
Adam<T>::Adam(AdamConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

template <typename T>
void Adam<T>::step(nn::ParamStore<T>& params) {
  if (m_.empty()) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_.emplace_back(params[k].value.size(), 0.0);
      v_.emplace_back(params[k].value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ShapeError("optimizer state does not match the parameter set");
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double update = cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
      p.value.data[i] = static_cast<T>(static_cast<double>(p.value.data[i]) - update);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace coastsurr
