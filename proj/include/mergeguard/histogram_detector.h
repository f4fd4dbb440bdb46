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

#ifndef MERGEGUARD_HISTOGRAM_DETECTOR_H_
#define MERGEGUARD_HISTOGRAM_DETECTOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/detector.h"
#include "mergeguard/grid_traversal.h"

namespace mergeguard {

// Unnormalized 2D point counts on a square lattice.
struct PointHistogram {
  double cell_size = 0.5;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::unordered_map<CellIndex, std::uint64_t, CellIndexHash> counts;
  std::uint64_t total = 0;

  void add(const Eigen::Vector2d& p);
  std::uint64_t at(const CellIndex& c) const;
};

// Points on a cell boundary go to the higher cell.
PointHistogram build_histogram(std::span<const Eigen::Vector2d> points,
                               double cell_size,
                               const Eigen::Vector2d& origin = Eigen::Vector2d::Zero());

// sum(min(h1, h2)) / sum(h1). Throws Error when h1 is empty or the lattices
// differ.
double intersection_score(const PointHistogram& h1, const PointHistogram& h2);

struct HistogramConfig {
  double cell_size = 0.5;
  std::size_t n_recent = 10;
  double t_unmerge = 0.5;

  void validate() const;
};

// Scores 1 - c between the newest current-epoch scans and all other epochs.
class HistogramDetector : public Detector {
 public:
  explicit HistogramDetector(HistogramConfig config = {});

  std::string_view name() const override { return "histogram"; }
  double threshold() const override { return config_.t_unmerge; }
  void reset() override;

  const HistogramConfig& config() const { return config_; }
  double last_intersection() const { return last_c_; }
  std::size_t other_builds() const { return other_builds_; }

 protected:
  double evaluate(const GraphSnapshot& snapshot, VertexId new_vertex) override;

 private:
  HistogramConfig config_;
  std::vector<std::pair<VertexId, Pose2>> other_signature_;
  std::optional<PointHistogram> other_;
  std::size_t other_builds_ = 0;
  double last_c_ = 0.0;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_HISTOGRAM_DETECTOR_H_
