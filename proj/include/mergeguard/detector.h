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

#ifndef MERGEGUARD_DETECTOR_H_
#define MERGEGUARD_DETECTOR_H_

#include <string>
#include <string_view>

#include "mergeguard/graph_store.h"

namespace mergeguard {

struct DetectorReport {
  std::string detector;
  VertexId vertex = 0;
  double score = 0.0;  // invalidity; larger means more likely invalid
  bool alarm = false;
  double compute_ms = 0.0;
};

// Online invalid-merge detector. Runs on every new vertex once the active
// graph holds more than one epoch; never mutates the graph.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual std::string_view name() const = 0;
  virtual double threshold() const = 0;

  // Times one evaluation and applies the alarm rule score > threshold.
  DetectorReport update(const GraphSnapshot& snapshot, VertexId new_vertex);

  // Forget cached state, e.g. after the graph was merged or unmerged.
  virtual void reset() = 0;

 protected:
  virtual double evaluate(const GraphSnapshot& snapshot, VertexId new_vertex) = 0;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_DETECTOR_H_
