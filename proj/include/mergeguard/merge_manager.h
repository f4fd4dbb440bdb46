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

#ifndef MERGEGUARD_MERGE_MANAGER_H_
#define MERGEGUARD_MERGE_MANAGER_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/graph_store.h"
#include "mergeguard/optimizer.h"

namespace mergeguard {

struct MergeOptions {
  OptimizerOptions optimizer;
  // Backups of graphs with more vertices than this are written to
  // `spill_directory`. Zero keeps every backup in memory.
  std::size_t spill_threshold_vertices = 0;
  std::filesystem::path spill_directory;
};

// Merges inactive graph `inactive_index` into the active graph using the
// given loop closure edges. Each edge must connect one active vertex and one
// vertex of that inactive graph. The inactive graph is backed up, rigidly
// pre-aligned with the first edge, unioned with the active graph, and the
// result is optimized with the first current-epoch vertex held fixed.
void merge(GraphStore& store, std::size_t inactive_index,
           std::vector<Edge> loop_edges, const MergeOptions& options = {});

// Undoes every merge into the active graph: drops all vertices of other
// epochs with their edges, re-optimizes, and restores the backed-up inactive
// graphs. Throws Error if the active graph holds a single epoch.
void unmerge(GraphStore& store, const MergeOptions& options = {});

// The vertex optimization keeps fixed: first vertex of the current epoch.
VertexId reference_vertex(const GraphStore& store);

// One scheduled merge, addressed by scan ordinals of a sequence.
struct ForcedMerge {
  std::size_t trigger_scan = 0;   // merge right after this scan's vertex
  std::size_t target_graph = 0;   // inactive index at trigger time
  std::size_t target_scan = 0;    // inactive vertex the loop edge starts at
  Pose2 relative_pose;            // trigger pose in the target vertex frame
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity() * 1e4;
  bool invalid = false;           // ground truth, evaluation only
};

struct MergeCandidate {
  std::size_t inactive_index = 0;
  std::vector<Edge> loop_edges;
};

// Injected place recognition: merges are only ever proposed when scheduled.
class MergeSchedule {
 public:
  MergeSchedule() = default;
  explicit MergeSchedule(std::vector<ForcedMerge> merges);

  void add(const ForcedMerge& merge);
  const std::vector<ForcedMerge>& merges() const { return merges_; }
  bool empty() const { return merges_.empty(); }

  // Merges scheduled for `scan_ordinal`, as loop edges between the target
  // inactive vertex and the trigger vertex. `vertex_of_scan` maps scan
  // ordinals to the vertex ids they produced. Targets that are not inactive,
  // or triggers not in the active graph, raise Error.
  std::vector<MergeCandidate> find_merge_candidates(
      const GraphStore& store, std::size_t scan_ordinal,
      const std::map<std::size_t, VertexId>& vertex_of_scan) const;

 private:
  std::vector<ForcedMerge> merges_;
};

// Applies candidates one after the other, resolving each target graph by the
// inactive vertex its first edge references (indices shift after a merge).
void apply_candidates(GraphStore& store,
                      const std::vector<MergeCandidate>& candidates,
                      const MergeOptions& options = {});

}  // namespace mergeguard

#endif  // MERGEGUARD_MERGE_MANAGER_H_
