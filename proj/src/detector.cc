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

#include "mergeguard/detector.h"

#include <chrono>
#include <cmath>

#include "mergeguard/error.h"

namespace mergeguard {

DetectorReport Detector::update(const GraphSnapshot& snapshot,
                                VertexId new_vertex) {
  if (snapshot.epoch_count < 2) {
    throw Error(std::string(name()) + " detector needs a merged graph (>= 2 epochs)");
  }
  const auto start = std::chrono::steady_clock::now();
  const double score = evaluate(snapshot, new_vertex);
  const auto stop = std::chrono::steady_clock::now();
  if (!std::isfinite(score)) {
    throw Error(std::string(name()) + " detector produced a non-finite score");
  }
  DetectorReport report;
  report.detector = std::string(name());
  report.vertex = new_vertex;
  report.score = score;
  report.alarm = score > threshold();
  report.compute_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return report;
}

}  // namespace mergeguard
