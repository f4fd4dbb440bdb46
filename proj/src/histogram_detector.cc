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

#include "mergeguard/histogram_detector.h"

#include <algorithm>
#include <cmath>

#include "mergeguard/error.h"

namespace mergeguard {

void PointHistogram::add(const Eigen::Vector2d& p) {
  ++counts[cell_of(p - origin, cell_size)];
  ++total;
}

std::uint64_t PointHistogram::at(const CellIndex& c) const {
  auto it = counts.find(c);
  return it == counts.end() ? 0 : it->second;
}

PointHistogram build_histogram(std::span<const Eigen::Vector2d> points,
                               double cell_size, const Eigen::Vector2d& origin) {
  if (!(cell_size > 0.0)) throw Error("histogram cell size must be positive");
  PointHistogram h;
  h.cell_size = cell_size;
  h.origin = origin;
  for (const Eigen::Vector2d& p : points) h.add(p);
  return h;
}

double intersection_score(const PointHistogram& h1, const PointHistogram& h2) {
  if (h1.total == 0) throw Error("intersection score needs a non-empty first histogram");
  if (h1.cell_size != h2.cell_size || h1.origin != h2.origin) {
    throw Error("histograms use different lattices");
  }
  std::uint64_t common = 0;
  for (const auto& [cell, n] : h1.counts) common += std::min(n, h2.at(cell));
  return static_cast<double>(common) / static_cast<double>(h1.total);
}

void HistogramConfig::validate() const {
  if (!(cell_size > 0.0) || n_recent == 0 || !(t_unmerge > 0.0 && t_unmerge < 1.0)) {
    throw Error("invalid histogram detector configuration");
  }
}

HistogramDetector::HistogramDetector(HistogramConfig config) : config_(config) {
  config_.validate();
}

void HistogramDetector::reset() {
  other_signature_.clear();
  other_.reset();
  last_c_ = 0.0;
}

double HistogramDetector::evaluate(const GraphSnapshot& snapshot, VertexId) {
  PointHistogram h1;
  h1.cell_size = config_.cell_size;
  for (const VertexView* v : snapshot.recent_current(config_.n_recent)) {
    for (const Eigen::Vector2d& p : v->scan.global_points()) h1.add(p);
  }
  if (h1.total == 0) throw Error("histogram detector: current epoch has no points");

  std::vector<std::pair<VertexId, Pose2>> signature;
  const auto others = snapshot.other_epoch_vertices();
  for (const VertexView* v : others) signature.emplace_back(v->id, v->scan.pose());
  const bool same =
      other_ && std::equal(signature.begin(), signature.end(), other_signature_.begin(),
                           other_signature_.end(), [](const auto& a, const auto& b) {
                             return a.first == b.first && a.second.x == b.second.x &&
                                    a.second.y == b.second.y &&
                                    a.second.theta == b.second.theta;
                           });
  if (!same) {
    other_.emplace();
    other_->cell_size = config_.cell_size;
    for (const VertexView* v : others) {
      for (const Eigen::Vector2d& p : v->scan.global_points()) other_->add(p);
    }
    other_signature_ = std::move(signature);
    ++other_builds_;
  }
  last_c_ = intersection_score(h1, *other_);
  return 1.0 - last_c_;
}

}  // namespace mergeguard
