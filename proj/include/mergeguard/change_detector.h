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

#ifndef MERGEGUARD_CHANGE_DETECTOR_H_
#define MERGEGUARD_CHANGE_DETECTOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mergeguard/detector.h"
#include "mergeguard/grid_traversal.h"
#include "mergeguard/scan.h"

namespace mergeguard {

// Ordered for fusion: no_info < change < agree.
enum class ClassLabel : std::uint8_t { kNoInfo = 0, kChange = 1, kAgree = 2 };

std::string_view to_string(ClassLabel label);

// Join on the label order: agree wins, then change.
constexpr ClassLabel fuse(ClassLabel a, ClassLabel b) { return a < b ? b : a; }

struct ChangeDetectorConfig {
  double t_r = 0.1;                                    // meters
  double t_alpha = 3.0 * std::numbers::pi / 180.0;     // radians
  std::size_t n_recent = 10;
  double tau_overlap = 1.0;                            // square meters
  double visibility_cell_size = 0.2;                   // meters
  double t_unmerge = 0.5;
  double cache_invalidate_trans = 0.02;                // meters
  double cache_invalidate_rot = 0.5 * std::numbers::pi / 180.0;  // radians

  // Throws Error unless all values are in range.
  void validate() const;

  // Smallest shared-cell count whose area reaches tau_overlap.
  std::size_t min_shared_cells() const;
};

// Label of one global point against the free space seen by `source`.
ClassLabel classify_point(const Eigen::Vector2d& global_point,
                          const Scan& source, const ChangeDetectorConfig& cfg);

// One label per point of `target`.
std::vector<ClassLabel> classify_scan_pair(const Scan& target,
                                           const Scan& source,
                                           const ChangeDetectorConfig& cfg);

// C_change / (C_agree + C_change), or 0 without evidence.
double invalidity_ratio(std::size_t change, std::size_t agree);

// Cells a scan observed: every cell its rays cross, endpoint included.
// Sorted and unique.
std::vector<CellIndex> observed_cells(const Scan& scan, double cell_size);

// Which other-epoch vertices observed each cell.
class VisibilityGrid {
 public:
  explicit VisibilityGrid(double cell_size = 0.2);

  double cell_size() const { return cell_size_; }

  // Clears and fills the grid from the other-epoch vertices of `snapshot`.
  void build(const GraphSnapshot& snapshot);

  void add(VertexId id, const Scan& scan);
  void clear();

  // Ids that observed the cell, ascending.
  std::span<const VertexId> at(const CellIndex& cell) const;
  std::size_t cell_count() const { return cells_.size(); }

  // For each vertex in the grid, how many of `cells` (sorted, unique) it
  // also observed. Vertices without shared cells are omitted.
  std::map<VertexId, std::size_t> shared_cells(
      std::span<const CellIndex> cells) const;

 private:
  double cell_size_;
  std::unordered_map<CellIndex, std::vector<VertexId>, CellIndexHash> cells_;
};

// (current-epoch vertex, other-epoch vertex) pairs: each of the n_recent
// newest current-epoch vertices with every grid vertex sharing at least
// tau_overlap of observed area.
std::vector<std::pair<VertexId, VertexId>> select_pairs(
    const GraphSnapshot& snapshot, const VisibilityGrid& grid,
    const ChangeDetectorConfig& cfg);

struct ChangeCounts {
  std::size_t agree = 0;
  std::size_t change = 0;
  std::size_t no_info = 0;
};

// Free-space violation detector. Pairs recent current-epoch scans with
// overlapping other-epoch scans, classifies both directions, and fuses
// point labels across pairs.
class ChangeDetector : public Detector {
 public:
  explicit ChangeDetector(ChangeDetectorConfig config = {});

  std::string_view name() const override { return "change"; }
  double threshold() const override { return config_.t_unmerge; }
  void reset() override;

  const ChangeDetectorConfig& config() const { return config_; }

  // Drops cached classifications whose target or source moved beyond the
  // invalidation thresholds. Returns the number dropped.
  std::size_t invalidate_cache(const GraphSnapshot& snapshot);

  const ChangeCounts& last_counts() const { return counts_; }
  const std::vector<std::pair<VertexId, VertexId>>& last_pairs() const {
    return pairs_;
  }

  // Instrumentation.
  std::size_t classifications() const { return classifications_; }
  std::size_t grid_builds() const { return grid_builds_; }
  std::size_t cache_size() const { return cache_.size(); }

  // Fused labels of the vertices considered in the last update, as
  // "vertex,point,label" rows.
  void write_labels_csv(const std::filesystem::path& path) const;

 protected:
  double evaluate(const GraphSnapshot& snapshot, VertexId new_vertex) override;

 private:
  struct Entry {
    Pose2 target_pose;
    Pose2 source_pose;
    std::vector<ClassLabel> labels;
  };
  struct CachedCells {
    Pose2 pose;
    std::vector<CellIndex> cells;
    std::size_t grid_build = 0;  // grid the shared counts were taken from
    std::map<VertexId, std::size_t> shared;
  };

  // Global points and bearing lookup of a vertex scan at its current pose.
  struct Prepared {
    Pose2 pose;
    const void* data = nullptr;
    std::vector<Eigen::Vector2d> globals;
    std::vector<std::uint32_t> bins;
  };

  bool moved(const Pose2& before, const Pose2& now) const;
  const Prepared& prepared(const VertexView& v);
  void refresh_grid(const GraphSnapshot& snapshot);
  const std::map<VertexId, std::size_t>& shared_of(const VertexView& v);
  void classify(const VertexView& target, const VertexView& source);

  ChangeDetectorConfig config_;
  VisibilityGrid grid_;
  std::map<VertexId, Pose2> grid_poses_;  // other-epoch poses at grid build
  std::map<VertexId, CachedCells> current_cells_;
  std::unordered_map<VertexId, Prepared> prepared_;
  std::map<std::pair<VertexId, VertexId>, Entry> cache_;  // (target, source)
  std::vector<std::pair<VertexId, VertexId>> pairs_;
  std::map<VertexId, std::vector<ClassLabel>> fused_;
  ChangeCounts counts_;
  std::size_t classifications_ = 0;
  std::size_t grid_builds_ = 0;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_CHANGE_DETECTOR_H_
