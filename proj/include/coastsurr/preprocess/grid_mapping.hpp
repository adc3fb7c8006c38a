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

#include <span>
#include <vector>

#include "coastsurr/core/types.hpp"

namespace coastsurr {

struct Cell {
  int i = 0;
  int j = 0;
  bool operator==(const Cell&) const = default;
};

struct CellAssignment {
  std::size_t point_index = 0;
  Cell cell;
  bool reassigned = false;
};

/// Bounds over every point of every table. Throws ConfigError on empty input
/// or zero extent.
GridSpec build_grid_spec(std::span<const InundationTable> tables, int n);
GridSpec build_grid_spec(std::span<const InundationPoint> points, int n);

/// Nearest-lower cell, clamped to the frame.
Cell map_to_cell(double x, double y, const GridSpec& spec) noexcept;
inline Cell map_to_cell(const InundationPoint& p, const GridSpec& spec) noexcept {
  return map_to_cell(p.x, p.y, spec);
}

/// Makes the mapping injective. Assignments are visited in order; the first
/// occupant of a cell keeps it and later arrivals move to the nearest empty
/// cell in Manhattan distance, ties going to the smaller i' then smaller j'.
/// Throws CapacityError when there are more assignments than cells.
std::vector<CellAssignment> resolve_conflicts(std::span<const CellAssignment> assignments,
                                              const GridSpec& spec);

/// map_to_cell for every point followed by resolve_conflicts.
std::vector<CellAssignment> assign_cells(std::span<const InundationPoint> points,
                                         const GridSpec& spec);

}  // namespace coastsurr
