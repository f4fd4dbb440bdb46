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

#ifndef MERGEGUARD_SCAN_H_
#define MERGEGUARD_SCAN_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/pose2.h"

namespace mergeguard {

struct PolarPoint {
  double bearing = 0.0;  // radians, sensor frame
  double range = 0.0;    // meters

  bool operator==(const PolarPoint&) const = default;
};

// One lidar sweep: a global sensor pose plus polar endpoints.
//
// The endpoint data is immutable and shared between copies, so copying a
// Scan (e.g. when backing up a graph) never duplicates ranges.
class Scan {
 public:
  Scan();

  // Requires strictly increasing bearings and 0 < range <= range_max.
  Scan(const Pose2& pose, std::vector<PolarPoint> points, double range_max);

  // Builds a scan from an equally spaced range array. Non-finite,
  // non-positive and out-of-range returns are dropped.
  static Scan from_ranges(const Pose2& pose, double bearing_origin,
                          double bearing_increment,
                          std::span<const double> ranges, double range_max);

  const Pose2& pose() const { return pose_; }
  void set_pose(const Pose2& pose) { pose_ = pose; }

  std::span<const PolarPoint> points() const { return data_->points; }
  std::size_t size() const { return data_->points.size(); }
  bool empty() const { return data_->points.empty(); }
  double range_max() const { return data_->range_max; }

  // Endpoint i in the sensor frame and in the global frame.
  Eigen::Vector2d local_point(std::size_t i) const;
  Eigen::Vector2d global_point(std::size_t i) const;
  std::vector<Eigen::Vector2d> global_points() const;

  // Bearings wrapped to (-pi, pi] in ascending order, and the index of the
  // point each sorted entry came from.
  std::span<const double> sorted_bearings() const {
    return data_->sorted_bearings;
  }
  std::span<const std::uint32_t> sorted_order() const {
    return data_->sorted_order;
  }

  // Identity of the shared endpoint block.
  const void* data_id() const { return data_.get(); }

  // Same pose and same endpoints.
  bool operator==(const Scan& other) const;

 private:
  struct Data {
    std::vector<PolarPoint> points;
    double range_max = 0.0;
    std::vector<double> sorted_bearings;
    std::vector<std::uint32_t> sorted_order;
  };

  Pose2 pose_;
  std::shared_ptr<const Data> data_;
};

}  // namespace mergeguard

#endif  // MERGEGUARD_SCAN_H_
