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

#include "mergeguard/graph_store.h"

#include <algorithm>
#include <string>

#include "mergeguard/error.h"

namespace mergeguard {

const VertexView* GraphSnapshot::find(VertexId id) const {
  auto it = std::lower_bound(
      vertices.begin(), vertices.end(), id,
      [](const VertexView& v, VertexId value) { return v.id < value; });
  if (it == vertices.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<const VertexView*> GraphSnapshot::recent_current(
    std::size_t n) const {
  std::vector<const VertexView*> out;
  for (auto it = vertices.rbegin(); it != vertices.rend() && out.size() < n;
       ++it) {
    if (it->epoch == current_epoch) out.push_back(&*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<const VertexView*> GraphSnapshot::current_epoch_vertices() const {
  std::vector<const VertexView*> out;
  for (const VertexView& v : vertices) {
    if (v.epoch == current_epoch) out.push_back(&v);
  }
  return out;
}

std::vector<const VertexView*> GraphSnapshot::other_epoch_vertices() const {
  std::vector<const VertexView*> out;
  for (const VertexView& v : vertices) {
    if (v.epoch != current_epoch) out.push_back(&v);
  }
  return out;
}

EpochId GraphStore::begin_epoch() {
  if (current_epoch_ != 0 && !active_.empty()) {
    inactive_.push_back(std::move(active_));
  }
  // Backups only describe merges into the outgoing active graph; once it is
  // archived they can never be restored.
  backups_.clear();
  active_ = SlamGraph();
  current_epoch_ = next_epoch_id_++;
  active_.add_epoch(current_epoch_);
  last_vertex_.reset();
  return current_epoch_;
}

VertexId GraphStore::add_vertex(const Scan& scan, const Pose2& odometry,
                                const Eigen::Matrix3d& information) {
  if (current_epoch_ == 0) {
    throw Error("add_vertex called before the first epoch was started");
  }
  Pose2 pose = odometry;
  if (last_vertex_) {
    pose = compose(active_.vertex(*last_vertex_).pose(), odometry);
  }
  Vertex vertex{next_vertex_id_++, current_epoch_, scan};
  vertex.scan.set_pose(pose);
  const VertexId id = vertex.id;
  active_.add_vertex(std::move(vertex));
  if (last_vertex_) {
    active_.add_edge(
        Edge{*last_vertex_, id, EdgeKind::kOdometry, odometry, information});
  }
  last_vertex_ = id;
  return id;
}

std::optional<std::size_t> GraphStore::find_inactive(VertexId id) const {
  for (std::size_t i = 0; i < inactive_.size(); ++i) {
    if (inactive_[i].contains(id)) return i;
  }
  return std::nullopt;
}

SlamGraph GraphStore::take_inactive(std::size_t index) {
  if (index >= inactive_.size()) {
    throw Error("inactive graph index " + std::to_string(index) +
                " out of range");
  }
  SlamGraph g = std::move(inactive_[index]);
  inactive_.erase(inactive_.begin() + static_cast<std::ptrdiff_t>(index));
  return g;
}

void GraphStore::restore_inactive(SlamGraph graph) {
  inactive_.push_back(std::move(graph));
}

void GraphStore::add_backup(GraphBackup backup) {
  backups_.push_back(std::move(backup));
}

std::vector<GraphBackup> GraphStore::take_backups() {
  std::vector<GraphBackup> out = std::move(backups_);
  backups_.clear();
  return out;
}

GraphSnapshot GraphStore::snapshot() const {
  GraphSnapshot snap;
  snap.current_epoch = current_epoch_;
  snap.epoch_count = active_.epochs().size();
  snap.vertices.reserve(active_.vertex_count());
  for (const auto& [id, v] : active_.vertices()) {
    snap.vertices.push_back(VertexView{id, v.epoch, v.scan});
  }
  return snap;
}

GraphStore GraphStore::assemble(SlamGraph active,
                                std::vector<SlamGraph> inactive,
                                std::vector<GraphBackup> backups,
                                EpochId current_epoch, VertexId next_vertex_id,
                                EpochId next_epoch_id,
                                std::optional<VertexId> last_vertex) {
  GraphStore store;
  store.active_ = std::move(active);
  store.inactive_ = std::move(inactive);
  store.backups_ = std::move(backups);
  store.current_epoch_ = current_epoch;
  store.next_vertex_id_ = next_vertex_id;
  store.next_epoch_id_ = next_epoch_id;
  store.last_vertex_ = last_vertex;
  return store;
}

bool GraphStore::epochs_disjoint() const {
  if (current_epoch_ != 0 && active_.epochs().count(current_epoch_) == 0) {
    return false;
  }
  EpochSet seen = active_.epochs();
  for (const SlamGraph& g : inactive_) {
    for (EpochId e : g.epochs()) {
      if (!seen.insert(e).second) return false;
    }
  }
  return true;
}

}  // namespace mergeguard
