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
#include <span>
#include <vector>

namespace coastsurr {

/// Pairwise (tree) summation; fixed reduction order for any input length.
double pairwise_sum(std::span<const double> v) noexcept;

/// Median of a copy of v; mean of the two middle values for even sizes.
/// Empty input returns 0.
double median(std::vector<double> v);

/// 1-based average ranks, ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace coastsurr
