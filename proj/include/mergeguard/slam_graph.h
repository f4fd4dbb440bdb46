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

#ifndef MERGEGUARD_SLAM_GRAPH_H_
#define MERGEGUARD_SLAM_GRAPH_H_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/pose2.h"
#include "mergeguard/scan.h"

namespace mergeguard {

using VertexId = std::int64_t;
using EpochId = std::int64_t;
using EpochSet = std::set<EpochId>;

// A keyframe. The vertex pose estimate lives in the scan, so the scan pose
// always mirrors the vertex.
struct Vertex {
  VertexId id = 0;
  EpochId epoch = 0;
  Scan scan;

  const Pose2& pose() const { return scan.pose(); }
};

enum class EdgeKind { kOdometry, kLoopClosure, kMergeLoopClosure };

std::string_view to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(std::string_view name);

// Relative pose constraint: pose(to) = pose(from) * measurement.
struct Edge {
  VertexId from = 0;
  VertexId to = 0;
  EdgeKind kind = EdgeKind::kOdometry;
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

bool is_symmetric_positive_definite(const Eigen::Matrix3d& m);

// Vertices, edges and the set of epochs a graph holds data from.
class SlamGraph {
 public:
  const EpochSet& epochs() const { return epochs_; }
  const std::map<VertexId, Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool empty() const { return vertices_.empty(); }
  std::size_t vertex_count() const { return vertices_.size(); }
  bool contains(VertexId id) const { return vertices_.count(id) != 0; }
  const Vertex& vertex(VertexId id) const;

  void add_epoch(EpochId epoch) { epochs_.insert(epoch); }

  // The vertex epoch is added to epochs() if missing. Throws on duplicate id.
  void add_vertex(Vertex vertex);

  // Throws if an endpoint is missing, from == to, or the information matrix
  // is not symmetric positive-definite.
  void add_edge(const Edge& edge);

  void set_pose(VertexId id, const Pose2& pose);

  // Applies `transform` to every vertex pose: p -> transform * p.
  void transform_all(const Pose2& transform);

  // Removes matching vertices and every edge incident to them. Epochs left
  // without vertices by the removal are dropped. Returns the number removed.
  std::size_t remove_vertices_if(const std::function<bool(const Vertex&)>& pred);

  // Moves all vertices, edges and epochs of `other` into this graph.
  void absorb(SlamGraph other);

  // Connected in the undirected sense. An empty graph counts as connected.
  bool is_connected() const;

  // Lowest vertex id with the given epoch, if any.
  const Vertex* first_vertex_of_epoch(EpochId epoch) const;

 private:
  EpochSet epochs_;
  std::map<VertexId, Vertex> vertices_;
  std::vector<Edge> edges_;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_SLAM_GRAPH_H_
