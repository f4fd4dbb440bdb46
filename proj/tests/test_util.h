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

#ifndef MERGEGUARD_TESTS_TEST_UTIL_H_
#define MERGEGUARD_TESTS_TEST_UTIL_H_

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mergeguard/scan.h"

namespace mergeguard::testing {

// A full-circle scan with `beams` evenly spaced bearings in (-pi, pi] and
// ranges drawn uniformly from [lo, hi]. Roughly `drop` of the beams are
// removed.
inline Scan random_scan(std::mt19937_64& rng, const Pose2& pose, int beams,
                        double lo, double hi, double drop = 0.0,
                        double range_max = 10.0) {
  std::uniform_real_distribution<double> range(lo, hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inc = 2.0 * std::numbers::pi / beams;
  std::vector<PolarPoint> points;
  for (int i = 0; i < beams; ++i) {
    const double r = range(rng);
    if (unit(rng) < drop) continue;
    points.push_back({-std::numbers::pi + inc * (i + 1), std::min(r, range_max)});
  }
  return Scan(pose, std::move(points), range_max);
}

inline Scan tiny_scan(const Pose2& pose = Pose2()) {
  return Scan(pose, {{-0.5, 1.0}, {0.0, 2.0}, {0.5, 1.5}}, 10.0);
}

}  // namespace mergeguard::testing

#endif  // MERGEGUARD_TESTS_TEST_UTIL_H_
