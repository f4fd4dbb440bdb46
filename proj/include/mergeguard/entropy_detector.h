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

#ifndef MERGEGUARD_ENTROPY_DETECTOR_H_
#define MERGEGUARD_ENTROPY_DETECTOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/detector.h"
#include "mergeguard/grid_traversal.h"

namespace mergeguard {

enum class DeltaFormula { kMeanOfParts, kLiteral };

std::string_view to_string(DeltaFormula formula);
DeltaFormula delta_formula_from_string(std::string_view name);

struct EntropyConfig {
  double radius = 0.3;
  std::size_t min_neighbors = 5;
  DeltaFormula delta_formula = DeltaFormula::kMeanOfParts;
  double t_unmerge = 0.1;

  void validate() const;
};

// Differential entropy 0.5*ln(det(2*pi*e*Sigma)) of a point neighbourhood
// (q included), with Sigma the 1/n covariance. Empty when there are fewer
// than min_neighbors points or Sigma is singular.
std::optional<double> point_entropy(std::span<const Eigen::Vector2d> neighbors,
                                    std::size_t min_neighbors);

// Mean point entropy over all points with a usable neighbourhood. Throws
// Error when the map is empty or every point is skipped.
double map_entropy(std::span<const Eigen::Vector2d> points, double radius,
                   std::size_t min_neighbors);

// mean_of_parts: H_all - (H_cur + H_other) / 2
// literal:       H_all - (H_cur - H_other) / 2
double delta_entropy(double h_all, double h_cur, double h_other,
                     DeltaFormula formula);

// Uniform bins of one radius for fixed-radius neighbour queries.
class PointIndex {
 public:
  explicit PointIndex(double radius);

  double radius() const { return radius_; }
  std::size_t size() const { return points_.size(); }
  const Eigen::Vector2d& point(std::size_t i) const { return points_[i]; }

  std::size_t add(const Eigen::Vector2d& p);

  // Calls f(index) for every stored point within the radius of q.
  template <typename F>
  void for_each_within(const Eigen::Vector2d& q, F&& f) const {
    const CellIndex c = cell_of(q, radius_);
    const double r2 = radius_ * radius_;
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = bins_.find({c.i + di, c.j + dj});
        if (it == bins_.end()) continue;
        for (std::uint32_t k : it->second) {
          if ((points_[k] - q).squaredNorm() <= r2) f(static_cast<std::size_t>(k));
        }
      }
    }
  }

  // Indices within the radius of q, ascending.
  std::vector<std::size_t> radius_query(const Eigen::Vector2d& q) const;

 private:
  double radius_;
  std::vector<Eigen::Vector2d> points_;
  std::unordered_map<CellIndex, std::vector<std::uint32_t>, CellIndexHash> bins_;
};

// Map entropy kept up to date as points are appended: every point holds
// running sums of its neighbours' offsets.
class IncrementalEntropy {
 public:
  IncrementalEntropy(double radius, std::size_t min_neighbors);

  void add(const Eigen::Vector2d& p);
  void add(std::span<const Eigen::Vector2d> points);

  std::size_t size() const { return index_.size(); }

  // Same value as map_entropy over all added points; throws likewise.
  double entropy() const;

  // Point entropy of point i from its accumulated neighbourhood.
  std::optional<double> point(std::size_t i) const;

 private:
  struct Sums {
    std::size_t n = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;

    void add(const Eigen::Vector2d& d);
  };

  std::size_t min_neighbors_;
  PointIndex index_;
  std::vector<Sums> sums_;
};

// Change of mean map entropy caused by merging.
class EntropyDetector : public Detector {
 public:
  explicit EntropyDetector(EntropyConfig config = {});

  std::string_view name() const override { return "entropy"; }
  double threshold() const override { return config_.t_unmerge; }
  void reset() override;

  const EntropyConfig& config() const { return config_; }

  double last_h_all() const { return h_all_; }
  double last_h_current() const { return h_cur_; }
  double last_h_other() const { return h_other_; }

  // Number of times the maps were rebuilt because known poses changed.
  std::size_t full_rebuilds() const { return rebuilds_; }

 protected:
  double evaluate(const GraphSnapshot& snapshot, VertexId new_vertex) override;

 private:
  struct Known {
    EpochId epoch;
    Pose2 pose;
  };

  void rebuild();

  EntropyConfig config_;
  EpochId current_epoch_ = 0;
  std::map<VertexId, Known> known_;
  std::optional<IncrementalEntropy> all_;
  std::optional<IncrementalEntropy> current_;
  std::optional<IncrementalEntropy> other_;
  double h_all_ = 0.0;
  double h_cur_ = 0.0;
  double h_other_ = 0.0;
  std::size_t rebuilds_ = 0;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_ENTROPY_DETECTOR_H_
