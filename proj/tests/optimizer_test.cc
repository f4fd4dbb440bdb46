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
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "mergeguard/error.h"
#include "mergeguard/optimizer.h"
#include "oracles.h"
#include "test_util.h"

namespace mergeguard {
namespace {

using testing::connect;
using testing::dense_oracle;
using testing::graph_with;
using testing::square_loop;

constexpr double kPi = std::numbers::pi;

TEST_CASE("zero-residual chain") {
  SlamGraph g = graph_with({Pose2(), Pose2(0.3, 0.2, 0.1), Pose2(-1, 2, 2)});
  const Pose2 z1(1, 0, 0.5), z2(0.5, -0.5, -1.0);
  connect(g, 1, 2, z1);
  connect(g, 2, 3, z2);
  const OptimizationResult r = optimize(g, {1});
  CHECK(r.converged);
  CHECK(r.final_chi2 <= 1e-20);
  const Pose2 p2 = compose(Pose2(), z1);
  const Pose2 p3 = compose(p2, z2);
  CHECK(std::abs(g.vertex(2).pose().x - p2.x) < 1e-6);
  CHECK(std::abs(g.vertex(3).pose().x - p3.x) < 1e-6);
  CHECK(std::abs(g.vertex(3).pose().y - p3.y) < 1e-6);
  CHECK(std::abs(normalize_angle(g.vertex(3).pose().theta - p3.theta)) < 1e-6);
  CHECK(g.vertex(1).pose().x == 0.0);
}

TEST_CASE("single fixed vertex without edges") {
  SlamGraph g = graph_with({Pose2(1, 2, 3)});
  const OptimizationResult r = optimize(g, {1});
  CHECK(r.iterations == 0);
  CHECK(r.final_chi2 == 0.0);
  CHECK(r.converged);
}

TEST_CASE("preconditions") {
  SlamGraph g = graph_with({Pose2(), Pose2(1, 0, 0)});
  CHECK_THROWS_AS(optimize(g, {1}), Error);  // disconnected
  connect(g, 1, 2, Pose2(1, 0, 0));
  CHECK_THROWS_AS(optimize(g, {}), Error);
  CHECK_THROWS_AS(optimize(g, {42}), Error);
}

TEST_CASE("consistent square loop recovers ground truth") {
  std::mt19937_64 rng(11);
  SlamGraph g = square_loop(rng, 0.0);
  const OptimizationResult r = optimize(g, {1});
  CHECK(r.converged);
  CHECK(r.final_chi2 <= r.initial_chi2);
  const std::vector<Pose2> truth{Pose2(0, 0, 0), Pose2(2, 0, kPi / 2),
                                 Pose2(2, 2, kPi), Pose2(0, 2, -kPi / 2)};
  for (int i = 0; i < 4; ++i) {
    const Pose2& p = g.vertex(i + 1).pose();
    CHECK(std::abs(p.x - truth[i].x) < 1e-6);
    CHECK(std::abs(p.y - truth[i].y) < 1e-6);
    CHECK(std::abs(normalize_angle(p.theta - truth[i].theta)) < 1e-6);
  }
}

TEST_CASE("small problems match the dense oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    SlamGraph g = square_loop(rng, 0.05);
    if (trial % 2 == 1) {
      // Extra vertices and a diagonal constraint: 6-vertex problem.
      g.add_vertex(Vertex{5, 1, testing::tiny_scan(Pose2(1, 1, 0.1))});
      g.add_vertex(Vertex{6, 1, testing::tiny_scan(Pose2(3, 1, 0.2))});
      connect(g, 1, 5, Pose2(1.02, 0.97, 0.05));
      connect(g, 5, 6, Pose2(2.05, 0.1, 0.1));
      connect(g, 2, 6, Pose2(1.0, -1.0, -1.4));
    }
    const std::vector<Pose2> expected = dense_oracle(g, 1);
    const OptimizationResult r = optimize(g, {1});
    CHECK(r.converged);
    std::size_t k = 0;
    for (const auto& [id, v] : g.vertices()) {
      CHECK(std::abs(v.pose().x - expected[k].x) < 1e-6);
      CHECK(std::abs(v.pose().y - expected[k].y) < 1e-6);
      CHECK(std::abs(normalize_angle(v.pose().theta - expected[k].theta)) < 1e-6);
      ++k;
    }
  }
}

TEST_CASE("chi2 never increases across iterations") {
  std::mt19937_64 rng(9);
  SlamGraph base = square_loop(rng, 0.1);
  double previous = compute_chi2(base);
  for (int iters = 1; iters <= 8; ++iters) {
    SlamGraph g = base;
    OptimizerOptions opts;
    opts.max_iterations = iters;
    const OptimizationResult r = optimize(g, {1}, opts);
    CHECK(r.iterations <= iters);
    CHECK(r.final_chi2 <= r.initial_chi2);
    CHECK(r.final_chi2 <= previous + 1e-12);
    CHECK(compute_chi2(g) == doctest::Approx(r.final_chi2));
    previous = r.final_chi2;
  }
}

TEST_CASE("gauge invariance") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    SlamGraph a = square_loop(rng, 0.05);
    SlamGraph b = a;
    const Pose2 motion(3.0 * trial - 7.0, 1.5 - trial, 0.4 * trial - 2.0);
    b.transform_all(motion);
    optimize(a, {1});
    optimize(b, {1});
    for (VertexId i = 1; i <= 4; ++i) {
      for (VertexId j = 1; j <= 4; ++j) {
        const Pose2 ra = between(a.vertex(i).pose(), a.vertex(j).pose());
        const Pose2 rb = between(b.vertex(i).pose(), b.vertex(j).pose());
        CHECK(std::abs(ra.x - rb.x) < 1e-9);
        CHECK(std::abs(ra.y - rb.y) < 1e-9);
        CHECK(std::abs(normalize_angle(ra.theta - rb.theta)) < 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace mergeguard
