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
#include <numbers>
#include <random>

#include "doctest.h"
#include "mergeguard/entropy_detector.h"
#include "mergeguard/error.h"
#include "wall_scene.h"

namespace mergeguard {
namespace {

using testing::cast_scan;
using testing::corridor_walls;
using testing::noisy_corridor;

std::vector<Eigen::Vector2d> gaussian_cloud(std::mt19937_64& rng, std::size_t n,
                                            double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<Eigen::Vector2d> out(n);
  for (auto& p : out) p = {g(rng), g(rng)};
  return out;
}

// Random blobs dense enough that nearly every point has a neighbourhood.
std::vector<Eigen::Vector2d> blob_map(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::normal_distribution<double> g(0.0, 0.15);
  std::vector<Eigen::Vector2d> centers(8);
  for (auto& c : centers) c = {u(rng), u(rng)};
  std::vector<Eigen::Vector2d> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = centers[i % centers.size()] + Eigen::Vector2d(g(rng), g(rng));
  }
  return out;
}

std::vector<Eigen::Vector2d> moved(const std::vector<Eigen::Vector2d>& pts,
                                   const Pose2& t, double scale = 1.0) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : pts) out.push_back(t * (scale * p));
  return out;
}

TEST_CASE("gaussian neighbourhood converges to the closed form") {
  std::mt19937_64 rng(17);
  const auto cloud = gaussian_cloud(rng, 1'000'000, 0.1);
  const double expected = std::log(2.0 * std::numbers::pi * std::numbers::e * 0.01);
  CHECK(expected == doctest::Approx(-1.7673).epsilon(1e-4));
  CHECK(*point_entropy(cloud, 5) == doctest::Approx(expected).epsilon(0.002));
}

TEST_CASE("degenerate neighbourhoods are skipped") {
  const std::vector<Eigen::Vector2d> same(10, Eigen::Vector2d(1.0, 2.0));
  CHECK_FALSE(point_entropy(same, 5).has_value());
  const std::vector<Eigen::Vector2d> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  CHECK_FALSE(point_entropy(line, 5).has_value());
  const std::vector<Eigen::Vector2d> two{{0, 0}, {0.1, 0.05}};
  CHECK_FALSE(point_entropy(two, 5).has_value());
  const std::vector<Eigen::Vector2d> three{{0, 0}, {0.1, 0.05}, {0.0, 0.1}};
  CHECK_FALSE(point_entropy(three, 5).has_value());
  CHECK(point_entropy(three, 3).has_value());
}

TEST_CASE("map entropy errors") {
  CHECK_THROWS_AS(map_entropy({}, 0.3, 5), Error);
  const std::vector<Eigen::Vector2d> isolated{{0, 0}, {5, 0}, {0, 5}};
  CHECK_THROWS_AS(map_entropy(isolated, 0.3, 5), Error);
}

TEST_CASE("delta formulas") {
  CHECK(delta_entropy(2, 1, 3, DeltaFormula::kMeanOfParts) == 0.0);
  CHECK(delta_entropy(2, 1, 3, DeltaFormula::kLiteral) == 3.0);
  CHECK(delta_formula_from_string("literal") == DeltaFormula::kLiteral);
  CHECK(to_string(DeltaFormula::kMeanOfParts) == "mean_of_parts");
  CHECK_THROWS_AS(delta_formula_from_string("plus"), Error);
}

TEST_CASE("rigid motion leaves entropy unchanged") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cloud = gaussian_cloud(rng, 50, 0.2);
    const Pose2 t(u(rng), u(rng), u(rng));
    CHECK(std::abs(*point_entropy(moved(cloud, t), 5) - *point_entropy(cloud, 5)) < 1e-9);
  }
  const auto map = blob_map(rng, 3000);
  const double h = map_entropy(map, 0.3, 5);
  const double h_moved = map_entropy(moved(map, Pose2(12.5, -7.25, 2.0)), 0.3, 5);
  CHECK(std::abs(h - h_moved) < 1e-9);
}

TEST_CASE("scaling shifts entropy by 2 ln s") {
  std::mt19937_64 rng(5);
  const auto cloud = gaussian_cloud(rng, 100, 0.1);
  const auto map = blob_map(rng, 2000);
  const double h_point = *point_entropy(cloud, 5);
  const double h_map = map_entropy(map, 0.3, 5);
  for (double s : {0.5, 2.0, 3.7}) {
    CHECK(std::abs(*point_entropy(moved(cloud, Pose2(), s), 5) - (h_point + 2.0 * std::log(s))) < 1e-9);
    CHECK(std::abs(map_entropy(moved(map, Pose2(), s), 0.3 * s, 5) - (h_map + 2.0 * std::log(s))) < 1e-9);
  }
}

TEST_CASE("duplicating a dense map leaves H unchanged") {
  std::mt19937_64 rng(8);
  const auto map = blob_map(rng, 4000);
  std::vector<Eigen::Vector2d> twice = map;
  twice.insert(twice.end(), map.begin(), map.end());
  IncrementalEntropy once_map(0.3, 5);
  once_map.add(map);
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < map.size(); ++i) skipped += !once_map.point(i).has_value();
  REQUIRE(skipped == 0);
  CHECK(std::abs(map_entropy(map, 0.3, 5) - map_entropy(twice, 0.3, 5)) < 1e-9);
}

TEST_CASE("dense wall strip matches interior point entropy") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> along(0.0, 20.0);
  std::uniform_real_distribution<double> across(0.0, 0.02);
  std::vector<Eigen::Vector2d> wall(20000);
  for (auto& p : wall) p = {along(rng), across(rng)};
  PointIndex index(0.3);
  for (const auto& p : wall) index.add(p);
  std::vector<Eigen::Vector2d> hood;
  for (std::size_t k : index.radius_query({10.0, 0.01})) hood.push_back(wall[k]);
  const double interior = *point_entropy(hood, 5);
  const double h = map_entropy(wall, 0.3, 5);
  CHECK(std::abs(h - interior) < 0.01 * std::abs(interior));
}

TEST_CASE("index queries and incremental sums match brute force") {
  std::mt19937_64 rng(13);
  const auto map = blob_map(rng, 1500);
  IncrementalEntropy inc(0.3, 5);
  PointIndex index(0.3);
  for (const auto& p : map) {
    inc.add(p);
    index.add(p);
  }
  std::size_t mismatched_sets = 0;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    std::vector<std::size_t> brute;
    for (std::size_t j = 0; j < map.size(); ++j) {
      if ((map[j] - map[i]).squaredNorm() <= 0.09) brute.push_back(j);
    }
    mismatched_sets += brute != index.radius_query(map[i]);
    std::vector<Eigen::Vector2d> hood;
    for (std::size_t j : brute) hood.push_back(map[j]);
    const auto expected = point_entropy(hood, 5);
    const auto got = inc.point(i);
    REQUIRE(expected.has_value() == got.has_value());
    if (expected) {
      ++usable;
      CHECK(std::abs(*expected - *got) < 1e-9);
    }
  }
  CHECK(mismatched_sets == 0);
  CHECK(usable > 1000);
}

TEST_CASE("detector on duplicate, aligned and crossing merges") {
  EntropyDetector det;
  const GraphSnapshot dup = noisy_corridor(Pose2(), true);
  const DetectorReport same = det.update(dup, dup.vertices.back().id);
  // Only points that reach min_neighbors by doubling move the mean.
  CHECK(std::abs(same.score) < 0.01);
  CHECK(det.last_h_current() == det.last_h_other());

  det.reset();
  const GraphSnapshot aligned = noisy_corridor(Pose2(), false);
  const double good = det.update(aligned, aligned.vertices.back().id).score;
  det.reset();
  const GraphSnapshot crossing = noisy_corridor(Pose2(0, 0, std::numbers::pi / 2), false);
  const double bad = det.update(crossing, crossing.vertices.back().id).score;
  MESSAGE("aligned dH " << good << ", crossing dH " << bad);
  CHECK(bad > 0.0);
  CHECK(bad > good);
}

TEST_CASE("incremental updates equal a fresh evaluation") {
  const GraphSnapshot full = noisy_corridor(Pose2(0.05, 0.0, 0.02), false, 4);
  EntropyDetector inc;
  GraphSnapshot partial = full;
  partial.vertices.resize(full.vertices.size() - 3);
  for (std::size_t k = partial.vertices.size(); k <= full.vertices.size(); ++k) {
    partial.vertices.assign(full.vertices.begin(), full.vertices.begin() + k);
    inc.update(partial, partial.vertices.back().id);
  }
  CHECK(inc.full_rebuilds() == 1);
  EntropyDetector fresh;
  fresh.update(full, full.vertices.back().id);
  CHECK(std::abs(inc.last_h_all() - fresh.last_h_all()) < 1e-9);
  CHECK(std::abs(inc.last_h_current() - fresh.last_h_current()) < 1e-9);
  CHECK(std::abs(inc.last_h_other() - fresh.last_h_other()) < 1e-9);

  // A pose change forces a rebuild.
  GraphSnapshot shifted = full;
  shifted.vertices[0].scan.set_pose(Pose2(0.0, 0.0, 0.3));
  inc.update(shifted, shifted.vertices.back().id);
  CHECK(inc.full_rebuilds() == 2);
}

TEST_CASE("detector needs both sub-maps") {
  GraphSnapshot snap = noisy_corridor(Pose2(), false);
  for (auto& v : snap.vertices) v.epoch = 2;
  snap.epoch_count = 2;
  EntropyDetector det;
  CHECK_THROWS_AS(det.update(snap, 1), Error);
}

}  // namespace
}  // namespace mergeguard
