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

#include <filesystem>
#include <random>

#include "doctest.h"
#include "mergeguard/error.h"
#include "mergeguard/merge_manager.h"
#include "mergeguard/serialization.h"
#include "test_util.h"

namespace mergeguard {
namespace {

using testing::tiny_scan;

const Eigen::Matrix3d kInfo = Eigen::Matrix3d::Identity() * 100.0;

// Epoch 1: `inactive_vertices` in a line; epoch 2 (active): `active_vertices`.
GraphStore two_epochs(int inactive_vertices, int active_vertices) {
  GraphStore store;
  store.begin_epoch();
  for (int i = 0; i < inactive_vertices; ++i) {
    store.add_vertex(tiny_scan(), Pose2(i == 0 ? 0.0 : 1.0, 0, 0), kInfo);
  }
  store.begin_epoch();
  for (int i = 0; i < active_vertices; ++i) {
    store.add_vertex(tiny_scan(), Pose2(i == 0 ? 5.0 : 1.0, 0, 0.1), kInfo);
  }
  return store;
}

Edge loop(VertexId from, VertexId to, const Pose2& z) {
  return Edge{from, to, EdgeKind::kLoopClosure, z, kInfo};
}

TEST_CASE("merge counts and epochs") {
  GraphStore store = two_epochs(2, 3);  // inactive ids 1,2; active 3,4,5
  const std::string before = serialize_graph(store.inactive()[0]);
  const Pose2 reference = store.active().vertex(3).pose();
  merge(store, 0, {loop(1, 5, Pose2(0.5, 0.2, 0.3))});
  CHECK(store.active().vertex_count() == 5);
  CHECK(store.active().edges().size() == 4);
  CHECK(store.active().epochs() == EpochSet{1, 2});
  CHECK(store.inactive().empty());
  REQUIRE(store.backups().size() == 1);
  CHECK(serialize_graph(*store.backups()[0].graph) == before);
  CHECK(store.active().edges().back().kind == EdgeKind::kMergeLoopClosure);
  // Active reference frame is untouched, bit for bit.
  const Pose2& after = store.active().vertex(3).pose();
  CHECK(after.x == reference.x);
  CHECK(after.y == reference.y);
  CHECK(after.theta == reference.theta);
  CHECK(store.active().is_connected());
  CHECK(store.epochs_disjoint());
}

TEST_CASE("merge aligns the inactive graph through the loop edge") {
  GraphStore store = two_epochs(3, 2);  // inactive 1..3, active 4,5
  const Pose2 z(0.0, 0.0, 0.0);
  merge(store, 0, {loop(2, 5, z)});
  // Consistent odometry on both sides: vertex 2 lands exactly on vertex 5.
  const Pose2& p2 = store.active().vertex(2).pose();
  const Pose2& p5 = store.active().vertex(5).pose();
  CHECK(std::abs(p2.x - p5.x) < 1e-9);
  CHECK(std::abs(p2.y - p5.y) < 1e-9);
  CHECK(compute_chi2(store.active()) < 1e-12);
}

TEST_CASE("merge validates loop edges") {
  GraphStore store = two_epochs(2, 2);  // inactive 1,2; active 3,4
  CHECK_THROWS_AS(merge(store, 0, {}), Error);
  CHECK_THROWS_AS(merge(store, 0, {loop(1, 99, Pose2())}), Error);
  CHECK_THROWS_AS(merge(store, 0, {loop(3, 4, Pose2())}), Error);
  CHECK_THROWS_AS(merge(store, 0, {loop(1, 2, Pose2())}), Error);
  CHECK_THROWS_AS(merge(store, 3, {loop(1, 3, Pose2())}), Error);
  CHECK(store.inactive().size() == 1);
  CHECK(store.backups().empty());
}

TEST_CASE("epoch union across multi-epoch inactive graphs") {
  GraphStore store;
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 1
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 2
  merge(store, 0, {loop(1, 2, Pose2(1, 0, 0))});
  CHECK(store.active().epochs() == EpochSet{1, 2});
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 3
  CHECK(store.inactive()[0].epochs() == EpochSet{1, 2});
  merge(store, 0, {loop(2, 3, Pose2(1, 0, 0))});
  CHECK(store.active().epochs() == EpochSet{1, 2, 3});
}

TEST_CASE("unmerge restores backups and the active graph") {
  GraphStore store = two_epochs(2, 3);
  const std::string inactive_before = serialize_graph(store.inactive()[0]);
  const GraphSnapshot active_before = store.snapshot();
  const std::size_t total = store.active().vertex_count() +
                            store.inactive()[0].vertex_count();
  merge(store, 0, {loop(1, 5, Pose2(0.5, 0.2, 0.3))});
  CHECK(store.active().vertex_count() + 0 == total);
  unmerge(store);
  CHECK(store.active().vertex_count() == 3);
  CHECK(store.active().epochs() == EpochSet{2});
  REQUIRE(store.inactive().size() == 1);
  CHECK(serialize_graph(store.inactive()[0]) == inactive_before);
  CHECK(store.backups().empty());
  for (const Edge& e : store.active().edges()) {
    CHECK(store.active().contains(e.from));
    CHECK(store.active().contains(e.to));
  }
  for (const VertexView& v : active_before.vertices) {
    const Pose2& p = store.active().vertex(v.id).pose();
    CHECK(std::abs(p.x - v.scan.pose().x) < 1e-6);
    CHECK(std::abs(p.y - v.scan.pose().y) < 1e-6);
    CHECK(std::abs(normalize_angle(p.theta - v.scan.pose().theta)) < 1e-6);
  }
  CHECK_THROWS_AS(unmerge(store), Error);
}

TEST_CASE("unmerge after two sequential merges restores both") {
  GraphStore store;
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 1
  store.add_vertex(tiny_scan(), Pose2(1, 0, 0), kInfo);  // 2
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 3
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);  // 4
  store.add_vertex(tiny_scan(), Pose2(1, 0, 0), kInfo);  // 5
  const std::string a = serialize_graph(store.inactive()[0]);
  const std::string b = serialize_graph(store.inactive()[1]);
  merge(store, 0, {loop(2, 5, Pose2(1, 1, 0))});
  merge(store, 0, {loop(3, 4, Pose2(-1, 0, 0))});
  CHECK(store.active().epochs() == EpochSet{1, 2, 3});
  unmerge(store);
  CHECK(store.active().epochs() == EpochSet{3});
  REQUIRE(store.inactive().size() == 2);
  CHECK(serialize_graph(store.inactive()[0]) == a);
  CHECK(serialize_graph(store.inactive()[1]) == b);
}

TEST_CASE("backups can spill to disk") {
  const auto dir = std::filesystem::temp_directory_path() / "mergeguard_spill_test";
  std::filesystem::create_directories(dir);
  MergeOptions options;
  options.spill_threshold_vertices = 1;
  options.spill_directory = dir;
  GraphStore store = two_epochs(3, 2);
  const std::string before = serialize_graph(store.inactive()[0]);
  merge(store, 0, {loop(1, 5, Pose2())}, options);
  REQUIRE(store.backups().size() == 1);
  CHECK_FALSE(store.backups()[0].graph.has_value());
  CHECK(std::filesystem::exists(store.backups()[0].spill_file));
  unmerge(store, options);
  CHECK(serialize_graph(store.inactive()[0]) == before);
  std::filesystem::remove_all(dir);
}

TEST_CASE("find_merge_candidates follows the schedule") {
  GraphStore store;
  std::map<std::size_t, VertexId> vertex_of_scan;
  store.begin_epoch();
  vertex_of_scan[0] = store.add_vertex(tiny_scan(), Pose2(), kInfo);
  store.begin_epoch();
  vertex_of_scan[1] = store.add_vertex(tiny_scan(), Pose2(), kInfo);
  store.begin_epoch();
  vertex_of_scan[2] = store.add_vertex(tiny_scan(), Pose2(), kInfo);

  MergeSchedule schedule;
  CHECK(schedule.find_merge_candidates(store, 2, vertex_of_scan).empty());
  schedule.add(ForcedMerge{2, 0, 0, Pose2(1, 0, 0), kInfo, false});
  schedule.add(ForcedMerge{2, 1, 1, Pose2(2, 0, 0), kInfo, true});
  CHECK(schedule.find_merge_candidates(store, 1, vertex_of_scan).empty());
  const auto candidates = schedule.find_merge_candidates(store, 2, vertex_of_scan);
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].loop_edges[0].from == vertex_of_scan[0]);
  CHECK(candidates[0].loop_edges[0].to == vertex_of_scan[2]);
  apply_candidates(store, candidates);
  CHECK(store.active().epochs() == EpochSet{1, 2, 3});
  CHECK(store.inactive().empty());

  MergeSchedule wrong;
  wrong.add(ForcedMerge{2, 0, 2, Pose2(), kInfo, false});
  CHECK_THROWS_AS(wrong.find_merge_candidates(store, 2, vertex_of_scan), Error);
}

}  // namespace
}  // namespace mergeguard
