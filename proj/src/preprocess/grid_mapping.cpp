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
#include "coastsurr/preprocess/grid_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {
namespace {

int axis_index(double v, double lo, double hi, int n) noexcept {
  const double t = (v - lo) / (hi - lo) * static_cast<double>(n - 1);
  if (!(t > 0.0)) return 0;  // also catches NaN
  if (t >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<int>(std::floor(t));
}

// First empty cell on the Manhattan shell of radius d around c, scanning in
// (i', j') lexicographic order.
bool scan_shell(const std::vector<char>& used, int n, Cell c, int d, Cell& out) {
  for (int di = -d; di <= d; ++di) {
    const int i = c.i + di;
    if (i < 0 || i >= n) continue;
    const int rem = d - std::abs(di);
    const int js[2] = {c.j - rem, c.j + rem};
    const int count = rem == 0 ? 1 : 2;
    for (int k = 0; k < count; ++k) {
      const int j = js[k];
      if (j < 0 || j >= n) continue;
      if (!used[static_cast<std::size_t>(i) * n + j]) {
        out = {i, j};
        return true;
      }
    }
  }
  return false;
}

}  // namespace

GridSpec build_grid_spec(std::span<const InundationPoint> points, int n) {
  if (points.empty()) throw ConfigError("cannot build a grid from zero points");
  GridSpec s;
  s.n = n;
  s.x_min = s.y_min = std::numeric_limits<double>::infinity();
  s.x_max = s.y_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    s.x_min = std::min(s.x_min, p.x);
    s.x_max = std::max(s.x_max, p.x);
    s.y_min = std::min(s.y_min, p.y);
    s.y_max = std::max(s.y_max, p.y);
  }
  s.validate();
  return s;
}

GridSpec build_grid_spec(std::span<const InundationTable> tables, int n) {
  std::vector<InundationPoint> all;
  for (const auto& t : tables) all.insert(all.end(), t.points.begin(), t.points.end());
  return build_grid_spec(std::span<const InundationPoint>(all), n);
}

Cell map_to_cell(double x, double y, const GridSpec& spec) noexcept {
  return {axis_index(x, spec.x_min, spec.x_max, spec.n),
          axis_index(y, spec.y_min, spec.y_max, spec.n)};
}

std::vector<CellAssignment> resolve_conflicts(std::span<const CellAssignment> assignments,
                                              const GridSpec& spec) {
  const int n = spec.n;
  const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (assignments.size() > cells) {
    throw CapacityError(std::to_string(assignments.size()) + " points do not fit in a " +
                        std::to_string(n) + "x" + std::to_string(n) + " grid");
  }
  std::vector<CellAssignment> out(assignments.begin(), assignments.end());
  std::vector<char> used(cells, 0);
  std::vector<std::size_t> displaced;

  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& a = out[k];
    a.cell.i = std::clamp(a.cell.i, 0, n - 1);
    a.cell.j = std::clamp(a.cell.j, 0, n - 1);
    auto& slot = used[static_cast<std::size_t>(a.cell.i) * n + a.cell.j];
    if (slot) {
      displaced.push_back(k);
    } else {
      slot = 1;
    }
  }

  for (std::size_t k : displaced) {
    auto& a = out[k];
    Cell found;
    bool ok = false;
    for (int d = 1; d <= 2 * (n - 1) && !ok; ++d) ok = scan_shell(used, n, a.cell, d, found);
    if (!ok) throw CapacityError("no empty cell left for point " + std::to_string(a.point_index));
    a.cell = found;
    a.reassigned = true;
    used[static_cast<std::size_t>(found.i) * n + found.j] = 1;
  }
  return out;
}

std::vector<CellAssignment> assign_cells(std::span<const InundationPoint> points,
                                         const GridSpec& spec) {
  std::vector<CellAssignment> raw(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    raw[k].point_index = k;
    raw[k].cell = map_to_cell(points[k], spec);
  }
  return resolve_conflicts(raw, spec);
}

}  // namespace coastsurr
