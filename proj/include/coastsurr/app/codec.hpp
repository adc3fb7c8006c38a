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
#include <string_view>

#include <json.hpp>

#include "coastsurr/core/types.hpp"
#include "coastsurr/nn/model.hpp"

namespace coastsurr::app {

// Sparse run-length grid encoding used on the wire:
//
//   {"n": 64, "runs": [[start, [v0, v1, ...]], ...]}
//
// start is the row-major flat index of the first cell of a run of
// consecutive nonzero cells; the values follow in order. Runs are sorted,
// never empty, and never adjacent. Every cell not covered is exactly zero.
nlohmann::json rle_encode(const Grid& g);
Grid rle_decode(const nlohmann::json& j);

/// FNV-1a 64 over parameter names, shapes and values, as 16 hex digits.
std::string model_version(const nn::ParamStore<float>& params);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace coastsurr::app
