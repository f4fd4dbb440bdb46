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

#include "mergeguard/merge_manager.h"

#include <string>

#include "mergeguard/error.h"
#include "mergeguard/serialization.h"

namespace mergeguard {
namespace {

GraphBackup make_backup(const SlamGraph& graph, const MergeOptions& options) {
  GraphBackup backup;
  backup.epochs = graph.epochs();
  if (options.spill_threshold_vertices > 0 &&
      graph.vertex_count() > options.spill_threshold_vertices) {
    std::string name = "backup";
    for (EpochId e : backup.epochs) name += "_" + std::to_string(e);
    backup.spill_file = options.spill_directory / (name + ".graph");
    write_graph_file(backup.spill_file, graph);
  } else {
    backup.graph = graph;
  }
  return backup;
}

SlamGraph load_backup(GraphBackup& backup) {
  if (backup.graph) return std::move(*backup.graph);
  SlamGraph graph = read_graph_file(backup.spill_file);
  std::error_code ignored;
  std::filesystem::remove(backup.spill_file, ignored);
  return graph;
}

}  // namespace

VertexId reference_vertex(const GraphStore& store) {
  const Vertex* first = store.active().first_vertex_of_epoch(store.current_epoch());
  if (first == nullptr) {
    throw Error("current epoch has no vertex to anchor the reference frame");
  }
  return first->id;
}

void merge(GraphStore& store, std::size_t inactive_index,
           std::vector<Edge> loop_edges, const MergeOptions& options) {
  if (loop_edges.empty()) throw Error("merge needs at least one loop edge");
  if (inactive_index >= store.inactive().size()) {
    throw Error("inactive graph index " + std::to_string(inactive_index) +
                " out of range");
  }
  const SlamGraph& active = store.active();
  const SlamGraph& other = store.inactive()[inactive_index];
  for (const Edge& e : loop_edges) {
    const bool from_active = active.contains(e.from);
    const bool to_active = active.contains(e.to);
    const bool from_other = other.contains(e.from);
    const bool to_other = other.contains(e.to);
    if ((!from_active && !from_other) || (!to_active && !to_other)) {
      throw Error("loop edge " + std::to_string(e.from) + " -> " +
                  std::to_string(e.to) + " references an unknown vertex");
    }
    if (from_active == to_active) {
      throw Error("loop edge " + std::to_string(e.from) + " -> " +
                  std::to_string(e.to) +
                  " must connect the active graph with the inactive graph");
    }
  }

  store.add_backup(make_backup(other, options));
  SlamGraph incoming = store.take_inactive(inactive_index);

  // Initial alignment from the first loop edge.
  const Edge& first = loop_edges.front();
  Pose2 target;
  VertexId moved = 0;
  if (incoming.contains(first.from)) {
    moved = first.from;
    target = compose(store.active().vertex(first.to).pose(),
                     inverse(first.measurement));
  } else {
    moved = first.to;
    target = compose(store.active().vertex(first.from).pose(),
                     first.measurement);
  }
  incoming.transform_all(compose(target, inverse(incoming.vertex(moved).pose())));

  SlamGraph& merged = store.mutable_active();
  merged.absorb(std::move(incoming));
  for (Edge& e : loop_edges) {
    e.kind = EdgeKind::kMergeLoopClosure;
    merged.add_edge(e);
  }
  optimize(merged, {reference_vertex(store)}, options.optimizer);
}

void unmerge(GraphStore& store, const MergeOptions& options) {
  if (store.active().epochs().size() <= 1) {
    throw Error("unmerge called on an active graph with a single epoch");
  }
  const EpochId current = store.current_epoch();
  SlamGraph& active = store.mutable_active();
  active.remove_vertices_if(
      [current](const Vertex& v) { return v.epoch != current; });
  active.add_epoch(current);
  if (!active.empty()) {
    optimize(active, {reference_vertex(store)}, options.optimizer);
  }
  for (GraphBackup& backup : store.take_backups()) {
    store.restore_inactive(load_backup(backup));
  }
}

MergeSchedule::MergeSchedule(std::vector<ForcedMerge> merges)
    : merges_(std::move(merges)) {}

void MergeSchedule::add(const ForcedMerge& merge) { merges_.push_back(merge); }

std::vector<MergeCandidate> MergeSchedule::find_merge_candidates(
    const GraphStore& store, std::size_t scan_ordinal,
    const std::map<std::size_t, VertexId>& vertex_of_scan) const {
  std::vector<MergeCandidate> out;
  for (const ForcedMerge& m : merges_) {
    if (m.trigger_scan != scan_ordinal) continue;
    const auto trigger = vertex_of_scan.find(m.trigger_scan);
    const auto target = vertex_of_scan.find(m.target_scan);
    if (trigger == vertex_of_scan.end() || target == vertex_of_scan.end()) {
      throw Error("forced merge at scan " + std::to_string(m.trigger_scan) +
                  " references a scan without a vertex");
    }
    if (!store.active().contains(trigger->second)) {
      throw Error("forced merge trigger vertex is not in the active graph");
    }
    const auto holder = store.find_inactive(target->second);
    if (!holder) {
      throw Error("forced merge target scan " + std::to_string(m.target_scan) +
                  " is not in an inactive graph");
    }
    if (*holder != m.target_graph) {
      throw Error("forced merge target scan " + std::to_string(m.target_scan) +
                  " is not in inactive graph " +
                  std::to_string(m.target_graph));
    }
    Edge edge{target->second, trigger->second, EdgeKind::kMergeLoopClosure,
              m.relative_pose, m.information};
    out.push_back(MergeCandidate{m.target_graph, {edge}});
  }
  return out;
}

void apply_candidates(GraphStore& store,
                      const std::vector<MergeCandidate>& candidates,
                      const MergeOptions& options) {
  for (const MergeCandidate& c : candidates) {
    if (c.loop_edges.empty()) throw Error("merge candidate without edges");
    const Edge& e = c.loop_edges.front();
    auto index = store.find_inactive(e.from);
    if (!index) index = store.find_inactive(e.to);
    if (!index) throw Error("merge candidate target is no longer inactive");
    merge(store, *index, c.loop_edges, options);
  }
}

}  // namespace mergeguard
