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
#include "coastsurr/training/gradcam.hpp"

#include <algorithm>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {

std::vector<std::string> gradcam_layers(const nn::ModelConfig& cfg) {
  std::vector<std::string> out;
  for (int k = 1; k <= cfg.depth_k; ++k) out.push_back("enc" + std::to_string(k));
  for (int m = 1; m <= cfg.marx_blocks; ++m) out.push_back("marx" + std::to_string(m));
  for (int k = 1; k <= cfg.depth_k; ++k) out.push_back("fr" + std::to_string(k));
  return out;
}

Grid grad_cam(const nn::Network<float>& net, const Grid& input, double slr_m, const std::string& layer) {
  const auto& cfg = net.config();
  const std::string name = layer.empty() ? "fr" + std::to_string(cfg.depth_k) : layer;
  const auto names = gradcam_layers(cfg);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw NotFoundError("unknown Grad-CAM layer '" + name + "'");

  nn::Tape<float> tape(true);
  const auto tr = net.attribution(tape, nn::grid_to_tensor(input), static_cast<float>(slr_m));
  nn::Var target;
  if (name.rfind("enc", 0) == 0) target = tr.encoder_outputs[std::stoi(name.substr(3)) - 1];
  else if (name.rfind("marx", 0) == 0) target = tr.marx_outputs[std::stoi(name.substr(4)) - 1];
  else target = tr.fr_outputs[std::stoi(name.substr(2)) - 1];

  const auto& y = tape.value(tr.output);
  nn::Tensor<float> seed(y.shape);
  for (std::size_t k = 0; k < y.size(); ++k) seed.data[k] = y.data[k] > 0.0f ? 1.0f : 0.0f;
  tape.backward(tr.output, seed);

  const int n = input.n();
  Grid out(n);
  const auto& a = tape.value(target);
  const auto& g = tape.grad(target);
  if (g.empty()) return out;
  const int c = a.channels(), h = a.height(), w = a.width();
  std::vector<double> cam(static_cast<std::size_t>(h) * w, 0.0);
  for (int ch = 0; ch < c; ++ch) {
    double alpha = 0.0;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) alpha += g.at(ch, i, j);
    }
    alpha /= static_cast<double>(h) * w;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) cam[static_cast<std::size_t>(i) * w + j] += alpha * a.at(ch, i, j);
    }
  }
  for (auto& v : cam) v = std::max(0.0, v);
  const auto [lo, hi] = std::minmax_element(cam.begin(), cam.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  const int fy = n / h, fx = n / w;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.at(i, j) = static_cast<float>((cam[static_cast<std::size_t>(i / fy) * w + j / fx] - *lo) / span);
    }
  }
  return out;
}

}  // namespace coastsurr
