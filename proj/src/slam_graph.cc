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

#include "mergeguard/slam_graph.h"

#include <string>

#include <Eigen/Cholesky>

#include "mergeguard/error.h"

namespace mergeguard {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kOdometry:
      return "odometry";
    case EdgeKind::kLoopClosure:
      return "loop_closure";
    case EdgeKind::kMergeLoopClosure:
      return "merge_loop_closure";
  }
  return "odometry";
}

EdgeKind edge_kind_from_string(std::string_view name) {
  if (name == "odometry") return EdgeKind::kOdometry;
  if (name == "loop_closure") return EdgeKind::kLoopClosure;
  if (name == "merge_loop_closure") return EdgeKind::kMergeLoopClosure;
  throw Error("unknown edge kind '" + std::string(name) + "'");
}

bool is_symmetric_positive_definite(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::LLT<Eigen::Matrix3d> llt(m);
  return llt.info() == Eigen::Success;
}

const Vertex& SlamGraph::vertex(VertexId id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    throw Error("unknown vertex " + std::to_string(id));
  }
  return it->second;
}

void SlamGraph::add_vertex(Vertex vertex) {
  const VertexId id = vertex.id;
  epochs_.insert(vertex.epoch);
  if (!vertices_.emplace(id, std::move(vertex)).second) {
    throw Error("duplicate vertex id " + std::to_string(id));
  }
}

void SlamGraph::add_edge(const Edge& edge) {
  if (edge.from == edge.to) {
    throw Error("edge endpoints must differ (vertex " +
                std::to_string(edge.from) + ")");
  }
  if (!contains(edge.from) || !contains(edge.to)) {
    throw Error("edge " + std::to_string(edge.from) + " -> " +
                std::to_string(edge.to) + " references an unknown vertex");
  }
  if (!is_symmetric_positive_definite(edge.information)) {
    throw Error("edge information matrix must be symmetric positive-definite");
  }
  edges_.push_back(edge);
}

void SlamGraph::set_pose(VertexId id, const Pose2& pose) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    throw Error("unknown vertex " + std::to_string(id));
  }
  it->second.scan.set_pose(pose);
}

void SlamGraph::transform_all(const Pose2& transform) {
  for (auto& [id, v] : vertices_) {
    v.scan.set_pose(compose(transform, v.scan.pose()));
  }
}

std::size_t SlamGraph::remove_vertices_if(
    const std::function<bool(const Vertex&)>& pred) {
  std::set<VertexId> removed;
  EpochSet touched;
  for (auto it = vertices_.begin(); it != vertices_.end();) {
    if (pred(it->second)) {
      removed.insert(it->first);
      touched.insert(it->second.epoch);
      it = vertices_.erase(it);
    } else {
      ++it;
    }
  }
  if (removed.empty()) return 0;
  std::erase_if(edges_, [&](const Edge& e) {
    return removed.count(e.from) != 0 || removed.count(e.to) != 0;
  });
  for (const auto& [id, v] : vertices_) touched.erase(v.epoch);
  for (EpochId e : touched) epochs_.erase(e);
  return removed.size();
}

void SlamGraph::absorb(SlamGraph other) {
  for (auto& [id, v] : other.vertices_) add_vertex(std::move(v));
  for (EpochId e : other.epochs_) epochs_.insert(e);
  for (const Edge& e : other.edges_) edges_.push_back(e);
}

bool SlamGraph::is_connected() const {
  if (vertices_.size() <= 1) return true;
  std::map<VertexId, std::vector<VertexId>> adjacency;
  for (const Edge& e : edges_) {
    adjacency[e.from].push_back(e.to);
    adjacency[e.to].push_back(e.from);
  }
  std::set<VertexId> seen;
  std::vector<VertexId> stack{vertices_.begin()->first};
  seen.insert(stack.back());
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (VertexId n : adjacency[v]) {
      if (seen.insert(n).second) stack.push_back(n);
    }
  }
  return seen.size() == vertices_.size();
}

const Vertex* SlamGraph::first_vertex_of_epoch(EpochId epoch) const {
  for (const auto& [id, v] : vertices_) {
    if (v.epoch == epoch) return &v;
  }
  return nullptr;
}

}  // namespace mergeguard
