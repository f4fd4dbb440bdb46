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
#include "mergeguard/pose2.h"

namespace mergeguard {
namespace {

constexpr double kPi = std::numbers::pi;

void check_pose(const Pose2& actual, const Pose2& expected, double tol) {
  CHECK(std::abs(actual.x - expected.x) <= tol);
  CHECK(std::abs(actual.y - expected.y) <= tol);
  CHECK(std::abs(normalize_angle(actual.theta - expected.theta)) <= tol);
}

TEST_CASE("normalize_angle maps into (-pi, pi]") {
  CHECK(normalize_angle(kPi) == kPi);
  CHECK(normalize_angle(-kPi) == kPi);
  CHECK(normalize_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(0.5) == 0.5);
  CHECK(normalize_angle(-0.5 - 4 * kPi) == doctest::Approx(-0.5));
}

TEST_CASE("compose and inverse examples") {
  check_pose(compose(Pose2(0, 0, 0), Pose2(1, 2, 0.3)), Pose2(1, 2, 0.3), 0);
  check_pose(compose(Pose2(1, 0, kPi / 2), Pose2(1, 0, 0)),
             Pose2(1, 1, kPi / 2), 1e-15);
  check_pose(inverse(Pose2(1, 0, kPi / 2)), Pose2(0, 1, -kPi / 2), 1e-15);
  const Pose2 a(1, 0, kPi / 2);
  check_pose(compose(a, inverse(a)), Pose2(), 1e-15);
}

TEST_CASE("compose is associative and inverse is its inverse") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 2000; ++i) {
    const Pose2 a(coord(rng), coord(rng), angle(rng));
    const Pose2 b(coord(rng), coord(rng), angle(rng));
    const Pose2 c(coord(rng), coord(rng), angle(rng));
    // Coordinates up to ~150 m: 1e-12 relative to that scale.
    const Pose2 left = compose(compose(a, b), c);
    const Pose2 right = compose(a, compose(b, c));
    CHECK(std::abs(left.x - right.x) <= 1e-12 * 200);
    CHECK(std::abs(left.y - right.y) <= 1e-12 * 200);
    CHECK(std::abs(normalize_angle(left.theta - right.theta)) <= 1e-12);
    const Pose2 id = compose(a, inverse(a));
    CHECK(std::abs(id.x) <= 1e-12 * 100);
    CHECK(std::abs(id.y) <= 1e-12 * 100);
    CHECK(std::abs(normalize_angle(id.theta)) <= 1e-12);
    const Pose2 rel = between(a, b);
    const Pose2 back = compose(a, rel);
    CHECK(std::abs(back.x - b.x) <= 1e-12 * 200);
    CHECK(std::abs(back.y - b.y) <= 1e-12 * 200);
  }
}

TEST_CASE("rotation_about keeps the center fixed") {
  const Eigen::Vector2d center(2.0, -1.0);
  const Pose2 r = rotation_about(center, -kPi / 2);
  const Eigen::Vector2d moved = r * center;
  CHECK(moved.x() == doctest::Approx(center.x()));
  CHECK(moved.y() == doctest::Approx(center.y()));
  // Clockwise quarter turn: a point east of the center ends up south of it.
  const Eigen::Vector2d east = r * Eigen::Vector2d(3.0, -1.0);
  CHECK(east.x() == doctest::Approx(2.0));
  CHECK(east.y() == doctest::Approx(-2.0));
}

}  // namespace
}  // namespace mergeguard
