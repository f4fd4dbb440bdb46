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

#ifndef MERGEGUARD_GRIDMAP_DETECTOR_H_
#define MERGEGUARD_GRIDMAP_DETECTOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/detector.h"
#include "mergeguard/grid_traversal.h"
#include "mergeguard/scan.h"

namespace mergeguard {

enum class CellState : std::uint8_t { kUnknown = 0, kEmpty = 1, kOccupied = 2 };

struct BoundingBox {
  Eigen::Vector2d min{0.0, 0.0};
  Eigen::Vector2d max{0.0, 0.0};

  void extend(const Eigen::Vector2d& p);
  bool valid() const { return min.x() <= max.x() && min.y() <= max.y(); }
  static BoundingBox empty();
};

// Sensor origins and endpoints of the given scans.
BoundingBox scan_bounds(std::span<const Scan* const> scans);

// Dense tri-state occupancy grid aligned to the world lattice (see
// CellIndex). Local cell (x, y) is lattice cell (min_cell.i + x,
// min_cell.j + y).
class TriStateGrid {
 public:
  TriStateGrid() = default;
  TriStateGrid(double cell_size, CellIndex min_cell, int width, int height);

  // Smallest lattice-aligned grid covering the box.
  static TriStateGrid covering(const BoundingBox& box, double cell_size);

  double cell_size() const { return cell_size_; }
  CellIndex min_cell() const { return min_cell_; }
  int width() const { return width_; }
  int height() const { return height_; }
  Eigen::Vector2d origin() const {
    return {min_cell_.i * cell_size_, min_cell_.j * cell_size_};
  }

  CellState at(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, CellState s) { cells_[index(x, y)] = s; }

  bool contains(const CellIndex& c) const;
  CellState at(const CellIndex& c) const;

  // Occupied always wins; empty only overwrites unknown.
  void mark_empty(const CellIndex& c);
  void mark_occupied(const CellIndex& c);

  std::size_t count(CellState s) const;
  bool same_geometry(const TriStateGrid& other) const;

  // Copy of the lattice window [min_cell, min_cell + size); cells outside
  // this grid come back unknown.
  TriStateGrid window(CellIndex min_cell, int width, int height) const;

  // Binary PGM (P5): unknown 128, empty 255, occupied 0; row 0 is the top
  // (largest y).
  void write_pgm(const std::filesystem::path& path) const;

  std::span<const CellState> cells() const { return cells_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  double cell_size_ = 0.025;
  CellIndex min_cell_;
  int width_ = 0;
  int height_ = 0;
  std::vector<CellState> cells_;
};

// Rays of one scan: cells strictly between sensor and endpoint become empty,
// the endpoint cell occupied. Rays are clipped to the grid.
void insert_scan(TriStateGrid& grid, const Scan& scan);

TriStateGrid build_grid(std::span<const Scan* const> scans,
                        const BoundingBox& box, double cell_size);

// Marks occupied every cell within the (2h+1)x(2h+1) square around an
// occupied cell.
TriStateGrid dilate_occupied(const TriStateGrid& grid, int half_width);

struct GridComparison {
  double ratio = 0.0;
  std::size_t overlap = 0;
  std::size_t contradictions = 0;
};

// overlap: cells known in both; contradictions: empty in one and occupied in
// the other. ratio = contradictions / overlap once overlap >= min_overlap,
// else 0. Throws Error on mismatched geometry.
GridComparison compare(const TriStateGrid& a, const TriStateGrid& b,
                       std::size_t min_overlap);

struct GridmapDetectorConfig {
  double cell_size = 0.025;
  std::size_t n_recent = 10;
  int dilation_half_width = 3;
  std::size_t tau_overlap_cells = 800;
  double t_unmerge = 0.2;
};

// Compares a gridmap of the newest current-epoch keyframes against one built
// from all other-epoch keyframes over the same window.
class GridmapDetector : public Detector {
 public:
  explicit GridmapDetector(GridmapDetectorConfig config = {});

  std::string_view name() const override { return "gridmap"; }
  double threshold() const override { return config_.t_unmerge; }
  void reset() override;

  const GridmapDetectorConfig& config() const { return config_; }
  const GridComparison& last_comparison() const { return last_; }

  // The two dilated grids of the last evaluation, for debugging dumps.
  const TriStateGrid& last_current_grid() const { return last_current_; }
  const TriStateGrid& last_other_grid() const { return last_other_; }

  // Number of times the other-epoch grid was rebuilt from scratch.
  std::size_t other_grid_builds() const { return other_builds_; }

 protected:
  double evaluate(const GraphSnapshot& snapshot, VertexId new_vertex) override;

 private:
  using Signature = std::vector<std::pair<VertexId, Pose2>>;

  GridmapDetectorConfig config_;
  Signature other_signature_;
  std::optional<TriStateGrid> other_grid_;
  std::size_t other_builds_ = 0;
  GridComparison last_;
  TriStateGrid last_current_;
  TriStateGrid last_other_;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_GRIDMAP_DETECTOR_H_
