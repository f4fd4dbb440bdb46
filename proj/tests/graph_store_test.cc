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

#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mergeguard/error.h"
#include "mergeguard/graph_store.h"
#include "mergeguard/serialization.h"
#include "test_util.h"

namespace mergeguard {
namespace {

using testing::tiny_scan;

const Eigen::Matrix3d kInfo = Eigen::Matrix3d::Identity() * 100.0;

TEST_CASE("begin_epoch on an empty store") {
  GraphStore store;
  CHECK(store.begin_epoch() == 1);
  CHECK(store.active().epochs() == EpochSet{1});
  CHECK(store.inactive().empty());
}

TEST_CASE("begin_epoch archives a non-empty active graph") {
  GraphStore store;
  store.begin_epoch();
  store.add_vertex(tiny_scan(), Pose2(), kInfo);
  CHECK(store.begin_epoch() == 2);
  CHECK(store.active().epochs() == EpochSet{2});
  REQUIRE(store.inactive().size() == 1);
  CHECK(store.inactive()[0].epochs() == EpochSet{1});
  CHECK(store.epochs_disjoint());
}

TEST_CASE("begin_epoch discards an empty active graph") {
  GraphStore store;
  store.begin_epoch();
  CHECK(store.begin_epoch() == 2);
  CHECK(store.active().epochs() == EpochSet{2});
  CHECK(store.inactive().empty());
}

TEST_CASE("add_vertex composes odometry") {
  GraphStore store;
  CHECK_THROWS_AS(store.add_vertex(tiny_scan(), Pose2(), kInfo), Error);
  store.begin_epoch();

  const VertexId a = store.add_vertex(tiny_scan(), Pose2(), kInfo);
  CHECK(store.active().edges().empty());
  CHECK(store.active().vertex(a).pose().x == 0.0);

  SUBCASE("straight step") {
    const VertexId b = store.add_vertex(tiny_scan(), Pose2(1, 0, 0), kInfo);
    const Pose2& p = store.active().vertex(b).pose();
    CHECK(p.x == 1.0);
    CHECK(p.y == 0.0);
    REQUIRE(store.active().edges().size() == 1);
    CHECK(store.active().edges()[0].kind == EdgeKind::kOdometry);
    CHECK(store.active().edges()[0].from == a);
    CHECK(store.active().edges()[0].to == b);
  }
  SUBCASE("turn then step") {
    store.add_vertex(tiny_scan(), Pose2(0, 0, std::numbers::pi / 2), kInfo);
    const VertexId c = store.add_vertex(tiny_scan(), Pose2(1, 0, 0), kInfo);
    const Pose2& p = store.active().vertex(c).pose();
    CHECK(p.x == doctest::Approx(0.0).epsilon(1e-15).scale(1));
    CHECK(p.y == doctest::Approx(1.0));
    CHECK(p.theta == doctest::Approx(std::numbers::pi / 2));
  }
}

TEST_CASE("first vertex of an epoch takes the odometry as its pose") {
  GraphStore store;
  store.begin_epoch();
  const VertexId a = store.add_vertex(tiny_scan(), Pose2(2, 3, 0.5), kInfo);
  CHECK(store.active().vertex(a).pose().x == 2.0);
  CHECK(store.active().vertex(a).pose().theta == 0.5);
}

TEST_CASE("vertex ids are unique across epochs") {
  GraphStore store;
  std::set<VertexId> ids;
  for (int epoch = 0; epoch < 4; ++epoch) {
    store.begin_epoch();
    for (int i = 0; i < 5; ++i) {
      CHECK(ids.insert(store.add_vertex(tiny_scan(), Pose2(0.1, 0, 0), kInfo))
                .second);
    }
    CHECK(store.epochs_disjoint());
  }
}

TEST_CASE("scan validation") {
  CHECK_THROWS_AS(Scan(Pose2(), {{0.1, 1.0}, {0.1, 1.0}}, 10.0), Error);
  CHECK_THROWS_AS(Scan(Pose2(), {{0.1, 11.0}}, 10.0), Error);
  CHECK_THROWS_AS(Scan(Pose2(), {{0.1, 0.0}}, 10.0), Error);
  const std::vector<double> ranges{1.0, 0.0, std::nan(""), 12.0, 2.0};
  const Scan s = Scan::from_ranges(Pose2(), 0.0, 0.1, ranges, 10.0);
  REQUIRE(s.size() == 2);
  CHECK(s.points()[1].bearing == doctest::Approx(0.4));
}

TEST_CASE("store serialization round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> step(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    GraphStore store;
    const int epochs = 1 + trial % 3;
    for (int e = 0; e < epochs; ++e) {
      store.begin_epoch();
      for (int i = 0; i < 4 + trial % 5; ++i) {
        store.add_vertex(testing::random_scan(rng, Pose2(), 16, 0.5, 9.0, 0.2),
                         Pose2(step(rng), step(rng), step(rng)), kInfo);
      }
    }
    const std::string text = serialize_store(store);
    const GraphStore back = deserialize_store(text);
    CHECK(serialize_store(back) == text);
    CHECK(back.current_epoch() == store.current_epoch());
    CHECK(back.next_vertex_id() == store.next_vertex_id());
    REQUIRE(back.active().vertex_count() == store.active().vertex_count());
    for (const auto& [id, v] : store.active().vertices()) {
      CHECK(back.active().vertex(id).scan == v.scan);
      CHECK(back.active().vertex(id).epoch == v.epoch);
    }
    REQUIRE(back.inactive().size() == store.inactive().size());
  }
}

TEST_CASE("graph format is byte-exact") {
  SlamGraph g;
  g.add_vertex(Vertex{1, 1, Scan(Pose2(0.5, -1, 0.25), {{0.0, 1.5}, {0.5, 2}}, 10)});
  g.add_vertex(Vertex{2, 1, Scan(Pose2(1, 0, 0), {}, 8)});
  g.add_edge(Edge{1, 2, EdgeKind::kOdometry, Pose2(0.5, 1, -0.25),
                  Eigen::Matrix3d::Identity() * 2});
  CHECK(serialize_graph(g) ==
        "G 1 1\n"
        "V 1 1 0.5 -1 0.25 10 2 0 1.5 0.5 2\n"
        "V 2 1 1 0 0 8 0\n"
        "E 1 2 odometry 0.5 1 -0.25 2 0 0 0 2 0 0 0 2\n"
        "END\n");
}

TEST_CASE("malformed graph text reports the line") {
  const std::string text =
      "G 1 1\n"
      "V 1 1 0 0 0 10 0\n"
      "E 1 7 odometry 0 0 0 1 0 0 0 1 0 0 0 1\n"
      "END\n";
  try {
    deserialize_graph(text);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
  }
  CHECK_THROWS_AS(deserialize_graph("G 1 1\nV 1 1 0 0 zero 10 0\nEND\n"), Error);
  CHECK_THROWS_AS(deserialize_graph("G 1 1\nV 1 1 0 0 0 10 0\n"), Error);
}

TEST_CASE("edges reject bad information and self loops") {
  SlamGraph g;
  g.add_vertex(Vertex{1, 1, tiny_scan()});
  g.add_vertex(Vertex{2, 1, tiny_scan()});
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = -1;
  CHECK_THROWS_AS(g.add_edge(Edge{1, 2, EdgeKind::kOdometry, Pose2(), bad}),
                  Error);
  CHECK_THROWS_AS(g.add_edge(Edge{1, 1, EdgeKind::kOdometry, Pose2(), kInfo}),
                  Error);
  CHECK_THROWS_AS(g.add_edge(Edge{1, 3, EdgeKind::kOdometry, Pose2(), kInfo}),
                  Error);
}

TEST_CASE("snapshot views") {
  GraphStore store;
  store.begin_epoch();
  for (int i = 0; i < 3; ++i) store.add_vertex(tiny_scan(), Pose2(1, 0, 0), kInfo);
  const GraphSnapshot snap = store.snapshot();
  CHECK(snap.epoch_count == 1);
  const auto recent = snap.recent_current(2);
  REQUIRE(recent.size() == 2);
  CHECK(recent[0]->id == 2);
  CHECK(recent[1]->id == 3);
  CHECK(snap.recent_current(10).size() == 3);
  CHECK(snap.find(2)->scan.pose().x == 2.0);
  CHECK(snap.find(9) == nullptr);
  // Snapshots share endpoint storage with the store.
  CHECK(snap.find(1)->scan.data_id() == store.active().vertex(1).scan.data_id());
}

}  // namespace
}  // namespace mergeguard
