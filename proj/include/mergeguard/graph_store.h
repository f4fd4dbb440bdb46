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

#ifndef MERGEGUARD_GRAPH_STORE_H_
#define MERGEGUARD_GRAPH_STORE_H_

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/slam_graph.h"

namespace mergeguard {

// Backed-up copy of an inactive graph taken right before it was merged into
// the active graph. Kept in memory, or spilled to a file in the graph
// serialization format.
struct GraphBackup {
  EpochSet epochs;
  std::optional<SlamGraph> graph;
  std::filesystem::path spill_file;
};

// One read-only view of a vertex handed to detectors.
struct VertexView {
  VertexId id = 0;
  EpochId epoch = 0;
  Scan scan;  // carries the pose estimate at snapshot time
};

// Immutable copy of the active graph for detectors. Scans share their
// endpoint data with the store.
struct GraphSnapshot {
  EpochId current_epoch = 0;
  std::size_t epoch_count = 0;
  std::vector<VertexView> vertices;  // ascending id

  const VertexView* find(VertexId id) const;

  // The `n` newest vertices of the current epoch, oldest first.
  std::vector<const VertexView*> recent_current(std::size_t n) const;
  std::vector<const VertexView*> current_epoch_vertices() const;
  std::vector<const VertexView*> other_epoch_vertices() const;
};

// One active graph, the archived inactive graphs, and the backups needed to
// undo merges. Single writer.
class GraphStore {
 public:
  // Archives the active graph (dropped if empty) and starts a new epoch.
  EpochId begin_epoch();

  // Appends a keyframe to the current epoch. The pose is the previous
  // current-epoch pose composed with `odometry` (identity for the first
  // vertex of an epoch), and an odometry edge links the two.
  VertexId add_vertex(const Scan& scan, const Pose2& odometry,
                      const Eigen::Matrix3d& information);

  EpochId current_epoch() const { return current_epoch_; }
  const SlamGraph& active() const { return active_; }
  SlamGraph& mutable_active() { return active_; }
  const std::vector<SlamGraph>& inactive() const { return inactive_; }
  const std::vector<GraphBackup>& backups() const { return backups_; }

  // Most recently added vertex of the current epoch.
  std::optional<VertexId> last_vertex() const { return last_vertex_; }

  // Index of the inactive graph holding `id`, if any.
  std::optional<std::size_t> find_inactive(VertexId id) const;

  // Primitives used by the merge manager.
  SlamGraph take_inactive(std::size_t index);
  void restore_inactive(SlamGraph graph);
  void add_backup(GraphBackup backup);
  std::vector<GraphBackup> take_backups();

  GraphSnapshot snapshot() const;

  // Counters used by serialization.
  VertexId next_vertex_id() const { return next_vertex_id_; }
  EpochId next_epoch_id() const { return next_epoch_id_; }

  // Rebuilds a store from its parts; used by deserialization.
  static GraphStore assemble(SlamGraph active, std::vector<SlamGraph> inactive,
                             std::vector<GraphBackup> backups,
                             EpochId current_epoch, VertexId next_vertex_id,
                             EpochId next_epoch_id,
                             std::optional<VertexId> last_vertex);

  // True when active and inactive epoch sets are pairwise disjoint and the
  // current epoch belongs to the active graph.
  bool epochs_disjoint() const;

 private:
  SlamGraph active_;
  std::vector<SlamGraph> inactive_;
  std::vector<GraphBackup> backups_;
  EpochId current_epoch_ = 0;
  VertexId next_vertex_id_ = 1;
  EpochId next_epoch_id_ = 1;
  std::optional<VertexId> last_vertex_;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_GRAPH_STORE_H_
