/*
 * Copyright 2026 The mergeguard Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MERGEGUARD_GRID_TRAVERSAL_H_
#define MERGEGUARD_GRID_TRAVERSAL_H_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>

#include <Eigen/Core>

namespace mergeguard {

// Integer cell on the lattice of square cells anchored at the world origin:
// cell (i, j) covers [i*s, (i+1)*s) x [j*s, (j+1)*s).
struct CellIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;

  bool operator==(const CellIndex&) const = default;
  auto operator<=>(const CellIndex&) const = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const {
    return std::hash<std::int64_t>()(c.i * 73856093LL ^ c.j * 19349663LL);
  }
};

inline CellIndex cell_of(const Eigen::Vector2d& p, double cell_size) {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_size)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_size))};
}

// Calls visit(cell) for every cell the segment start -> end passes through,
// in order, starting with the cell of `start` and ending with the cell of
// `end` (4-connected walk, Amanatides-Woo).
template <typename Visit>
void traverse_segment(const Eigen::Vector2d& start, const Eigen::Vector2d& end,
                      double cell_size, Visit&& visit) {
  CellIndex cell = cell_of(start, cell_size);
  const CellIndex last = cell_of(end, cell_size);
  visit(cell);
  const std::int64_t steps = std::llabs(last.i - cell.i) + std::llabs(last.j - cell.j);
  if (steps == 0) return;

  const double dx = end.x() - start.x();
  const double dy = end.y() - start.y();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int step_i = dx > 0 ? 1 : -1;
  const int step_j = dy > 0 ? 1 : -1;
  const double delta_i = dx != 0.0 ? cell_size / std::abs(dx) : kInf;
  const double delta_j = dy != 0.0 ? cell_size / std::abs(dy) : kInf;
  double next_i = kInf;
  double next_j = kInf;
  if (dx != 0.0) {
    const double boundary = (cell.i + (step_i > 0 ? 1 : 0)) * cell_size;
    next_i = (boundary - start.x()) / dx;
  }
  if (dy != 0.0) {
    const double boundary = (cell.j + (step_j > 0 ? 1 : 0)) * cell_size;
    next_j = (boundary - start.y()) / dy;
  }
  for (std::int64_t k = 0; k < steps; ++k) {
    const bool can_i = cell.i != last.i;
    const bool can_j = cell.j != last.j;
    if (can_i && (!can_j || next_i < next_j)) {
      cell.i += step_i;
      next_i += delta_i;
    } else {
      cell.j += step_j;
      next_j += delta_j;
    }
    visit(cell);
  }
}

// Liang-Barsky clip of start + t*(end - start), t in [0, 1], against the box.
// Returns false when the segment misses the box.
inline bool clip_segment(const Eigen::Vector2d& start, const Eigen::Vector2d& end,
                         const Eigen::Vector2d& box_min,
                         const Eigen::Vector2d& box_max, double& t0,
                         double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const Eigen::Vector2d d = end - start;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {start.x() - box_min.x(), box_max.x() - start.x(),
                       start.y() - box_min.y(), box_max.y() - start.y()};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double t = q[k] / p[k];
    if (p[k] < 0.0) {
      if (t > t1) return false;
      if (t > t0) t0 = t;
    } else {
      if (t < t0) return false;
      if (t < t1) t1 = t;
    }
  }
  return t0 <= t1;
}

}  // namespace mergeguard

#endif  // MERGEGUARD_GRID_TRAVERSAL_H_
