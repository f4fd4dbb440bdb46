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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "mergeguard/change_detector.h"
#include "mergeguard/error.h"
#include "oracles.h"
#include "test_util.h"
#include "wall_scene.h"

namespace mergeguard {
namespace {

using testing::corridor_snapshot;
using testing::oracle_label;

constexpr double kPi = std::numbers::pi;

// Source at the origin looking along +x with the given near ranges.
Scan source_with(std::initializer_list<double> ranges) {
  std::vector<PolarPoint> pts;
  double b = -0.01;
  for (double r : ranges) {
    pts.push_back({b, r});
    b += 0.01;
  }
  return Scan(Pose2(), std::move(pts), 30.0);
}

ClassLabel label_at(double r_t, const Scan& source) {
  return classify_point({r_t, 0.0}, source, ChangeDetectorConfig{});
}

TEST_CASE("classification examples") {
  CHECK(label_at(5.0, source_with({5.0})) == ClassLabel::kAgree);
  CHECK(label_at(3.0, source_with({5.0, 5.05})) == ClassLabel::kChange);
  CHECK(label_at(7.0, source_with({5.0, 5.05})) == ClassLabel::kNoInfo);
  for (double r : {4.0, 4.5, 5.0, 5.5, 6.0}) {
    CHECK(label_at(r, source_with({4.0, 6.0})) == ClassLabel::kNoInfo);
  }
  // Band edges.
  CHECK(label_at(4.91, source_with({5.0})) == ClassLabel::kAgree);
  CHECK(label_at(4.89, source_with({5.0})) == ClassLabel::kChange);
  CHECK(label_at(5.11, source_with({5.0})) == ClassLabel::kNoInfo);
  // Nothing within T_alpha of the bearing.
  CHECK(classify_point({0.0, 5.0}, source_with({5.0}), {}) == ClassLabel::kNoInfo);
  // Beyond the source's range_max.
  const Scan short_range(Pose2(), {{0.0, 1.0}}, 2.0);
  CHECK(classify_point({2.5, 0.0}, short_range, {}) == ClassLabel::kNoInfo);
}

TEST_CASE("bearing window wraps at pi") {
  const Scan source(Pose2(), {{-kPi + 0.01, 4.0}, {kPi, 4.02}}, 30.0);
  const double b = kPi - 0.02;
  CHECK(classify_point({3.0 * std::cos(b), 3.0 * std::sin(b)}, source, {}) ==
        ClassLabel::kChange);
  const double b2 = -kPi + 0.03;
  CHECK(classify_point({4.01 * std::cos(b2), 4.01 * std::sin(b2)}, source, {}) ==
        ClassLabel::kAgree);
}

TEST_CASE("fuse examples and lattice laws") {
  using L = ClassLabel;
  CHECK(fuse(L::kAgree, L::kChange) == L::kAgree);
  CHECK(fuse(L::kNoInfo, L::kNoInfo) == L::kNoInfo);
  CHECK(fuse(L::kNoInfo, L::kChange) == L::kChange);
  const L all[] = {L::kNoInfo, L::kChange, L::kAgree};
  for (L a : all) {
    CHECK(fuse(a, a) == a);
    CHECK(fuse(a, L::kNoInfo) == a);
    for (L b : all) {
      CHECK(fuse(a, b) == fuse(b, a));
      for (L c : all) CHECK(fuse(fuse(a, b), c) == fuse(a, fuse(b, c)));
    }
  }
  // Any processing order of a label list gives the same result.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<L> labels(1 + trial % 7);
    for (L& l : labels) l = all[pick(rng)];
    L forward = L::kNoInfo;
    for (L l : labels) forward = fuse(forward, l);
    std::shuffle(labels.begin(), labels.end(), rng);
    L shuffled = L::kNoInfo;
    for (L l : labels) shuffled = fuse(shuffled, l);
    REQUIRE(forward == shuffled);
  }
}

TEST_CASE("classify_scan_pair matches the linear-search oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChangeDetectorConfig cfg;
  std::size_t counts[3] = {0, 0, 0};
  std::size_t mismatches = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    Scan target;
    Scan source;
    if (pair % 4 == 0) {
      target = testing::random_scan(rng, Pose2(jitter(rng), jitter(rng), 3 * jitter(rng)),
                                    180, 0.5, 4.0, 0.2);
      source = testing::random_scan(rng, Pose2(jitter(rng), jitter(rng), 3 * jitter(rng)),
                                    360, 0.5, 4.0, 0.3);
    } else {
      std::vector<Scan> scene = testing::random_wall_scene(rng, 2, 360);
      target = scene[0];
      source = scene[1];
      if (unit(rng) < 0.5) {
        target.set_pose(Pose2(target.pose().x + jitter(rng), target.pose().y + jitter(rng),
                              target.pose().theta + jitter(rng)));
      }
    }
    if (pair % 10 == 0) cfg.t_alpha = 0.2;  // wide windows now and then
    else cfg.t_alpha = 3.0 * kPi / 180.0;
    const auto labels = classify_scan_pair(target, source, cfg);
    REQUIRE(labels.size() == target.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const ClassLabel expected = oracle_label(target.global_point(i), source, cfg);
      mismatches += labels[i] != expected;
      ++counts[static_cast<int>(expected)];
    }
  }
  CHECK(mismatches == 0);
  CHECK(counts[0] > 1000);
  CHECK(counts[1] > 1000);
  CHECK(counts[2] > 1000);
}

TEST_CASE("a scan never contradicts itself") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Scan s = trial % 2 == 0
                       ? testing::random_scan(rng, Pose2(0.3, -0.2, 0.1 * trial), 360, 0.2, 8.0, 0.3)
                       : testing::random_wall_scene(rng, 1, 360)[0];
    for (ClassLabel l : classify_scan_pair(s, s, {})) CHECK(l != ClassLabel::kChange);
  }
}

TEST_CASE("invalidity ratio") {
  CHECK(invalidity_ratio(0, 0) == 0.0);
  CHECK(invalidity_ratio(0, 10) == 0.0);
  CHECK(invalidity_ratio(7, 7) == 0.5);
  CHECK(invalidity_ratio(5, 0) == 1.0);
  double prev = -1.0;
  for (std::size_t c = 0; c < 50; ++c) {
    const double r = invalidity_ratio(c, 20);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("config") {
  ChangeDetectorConfig cfg;
  CHECK(cfg.min_shared_cells() == 25);
  cfg.t_unmerge = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.t_r = 0.0;
  CHECK_THROWS_AS(ChangeDetector{cfg}, Error);
}

// Current vertex 2 sees cells (0..24, 0); other vertex 1 looks back along the
// same row and ends in cell `last`.
GraphSnapshot row_snapshot(double back_range) {
  GraphSnapshot snap;
  snap.current_epoch = 2;
  snap.epoch_count = 2;
  snap.vertices.push_back({1, 1, Scan(Pose2(4.9, 0.1, 0.0), {{kPi, back_range}}, 10.0)});
  snap.vertices.push_back({2, 2, Scan(Pose2(0.1, 0.1, 0.0), {{0.0, 4.8}}, 10.0)});
  return snap;
}

std::size_t brute_force_shared(const GraphSnapshot& snap) {
  // Cells near the row, tested against both rays directly.
  std::size_t shared = 0;
  for (int i = -3; i < 30; ++i) {
    for (int j = -2; j < 3; ++j) {
      const Eigen::Vector2d lo(i * 0.2, j * 0.2);
      bool both = true;
      for (const VertexView& v : snap.vertices) {
        const Eigen::Vector2d o = v.scan.pose().translation();
        const Eigen::Vector2d e = v.scan.global_point(0);
        const bool endpoint_here = std::floor(e.x() / 0.2) == i && std::floor(e.y() / 0.2) == j;
        both = both && (endpoint_here || testing::segment_meets_open_square(o, e, lo, 0.2));
      }
      shared += both;
    }
  }
  return shared;
}

TEST_CASE("pairing needs 25 shared cells") {
  const ChangeDetectorConfig cfg;
  const GraphSnapshot short_snap = row_snapshot(4.6);
  const GraphSnapshot long_snap = row_snapshot(4.8);
  CHECK(brute_force_shared(short_snap) == 24);
  CHECK(brute_force_shared(long_snap) == 25);

  VisibilityGrid grid(0.2);
  grid.build(short_snap);
  CHECK(grid.shared_cells(observed_cells(short_snap.vertices[1].scan, 0.2)).at(1) == 24);
  CHECK(select_pairs(short_snap, grid, cfg).empty());
  grid.build(long_snap);
  const auto pairs = select_pairs(long_snap, grid, cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::make_pair(VertexId{2}, VertexId{1}));
}

TEST_CASE("visibility grid holds only other-epoch vertices") {
  const GraphSnapshot snap = corridor_snapshot(Pose2());
  VisibilityGrid grid(0.2);
  grid.build(snap);
  CHECK(grid.cell_count() > 0);
  for (const VertexView& v : snap.vertices) {
    for (const CellIndex& c : observed_cells(v.scan, 0.2)) {
      for (VertexId id : grid.at(c)) CHECK(snap.find(id)->epoch == 1);
    }
  }
  // Every recent vertex pairs with every overlapping corridor scan.
  CHECK(select_pairs(snap, grid, {}).size() == 4 * 6);
  // Disjoint areas.
  const GraphSnapshot far = corridor_snapshot(Pose2(100.0, 0.0, 0.0));
  grid.build(far);
  CHECK(select_pairs(far, grid, {}).empty());
}

TEST_CASE("detector scores aligned and rotated merges") {
  ChangeDetector det;
  const DetectorReport good = det.update(corridor_snapshot(Pose2()), 10);
  CHECK(det.last_counts().agree > 1000);
  CHECK(good.score < 0.05);
  CHECK_FALSE(good.alarm);

  det.reset();
  const DetectorReport bad = det.update(corridor_snapshot(Pose2(0, 0, kPi / 2)), 10);
  CHECK(bad.score > 0.5);
  CHECK(bad.alarm);

  det.reset();
  const DetectorReport none = det.update(corridor_snapshot(Pose2(100, 0, 0)), 10);
  CHECK(det.last_pairs().empty());
  CHECK(none.score == 0.0);
}

TEST_CASE("classification cache follows vertex motion") {
  ChangeDetector det;
  GraphSnapshot snap = corridor_snapshot(Pose2());
  det.update(snap, 10);
  const std::size_t first = det.classifications();
  CHECK(first == 2 * 4 * 6);
  CHECK(det.grid_builds() == 1);

  det.update(snap, 10);
  CHECK(det.classifications() == first);

  // Small motion keeps everything.
  Pose2 p = snap.vertices[0].scan.pose();
  snap.vertices[0].scan.set_pose(Pose2(p.x + 0.01, p.y, p.theta));
  CHECK(det.invalidate_cache(snap) == 0);
  det.update(snap, 10);
  CHECK(det.classifications() == first);
  CHECK(det.grid_builds() == 1);

  // A 0.5 m move drops the 8 entries citing vertex 1 and redoes them.
  snap.vertices[0].scan.set_pose(Pose2(p.x + 0.5, p.y, p.theta));
  CHECK(det.invalidate_cache(snap) == 2 * 4);
  det.update(snap, 10);
  CHECK(det.grid_builds() == 2);
  CHECK(det.cache_size() <= first);
  CHECK(det.classifications() > first);
}

TEST_CASE("label csv") {
  ChangeDetector det;
  det.update(corridor_snapshot(Pose2()), 10);
  const auto path = std::filesystem::temp_directory_path() / "mergeguard_labels.csv";
  det.write_labels_csv(path);
  std::ifstream in(path);
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "vertex,point,label");
  CHECK(row.rfind("1,0,", 0) == 0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mergeguard
