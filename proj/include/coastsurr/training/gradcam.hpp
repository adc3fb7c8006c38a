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

#include <string>
#include <vector>

#include "coastsurr/core/types.hpp"
#include "coastsurr/nn/model.hpp"

namespace coastsurr {

/// Layers addressable by grad_cam: enc1..encK, marx1..marxM, fr1..frK.
std::vector<std::string> gradcam_layers(const nn::ModelConfig& cfg);

/// Gradient-weighted activation map for the summed positive output, upsampled
/// to n x n and min-max scaled to [0, 1]. An empty layer name selects the
/// last decoder block. A flat map comes back as zeros.
Grid grad_cam(const nn::Network<float>& net, const Grid& input, double slr_m, const std::string& layer = "");

}  // namespace coastsurr
