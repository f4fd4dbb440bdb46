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

#include "mergeguard/scan.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mergeguard/error.h"

namespace mergeguard {

Scan::Scan() : data_(std::make_shared<const Data>()) {}

Scan::Scan(const Pose2& pose, std::vector<PolarPoint> points, double range_max)
    : pose_(pose) {
  if (!(range_max > 0.0) || !std::isfinite(range_max)) {
    throw Error("scan range_max must be positive and finite");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PolarPoint& p = points[i];
    if (!std::isfinite(p.bearing) || !(p.range > 0.0) || p.range > range_max) {
      throw Error("scan point " + std::to_string(i) +
                  " has an invalid bearing or range");
    }
    if (i > 0 && !(p.bearing > points[i - 1].bearing)) {
      throw Error("scan bearings must be strictly increasing (point " +
                  std::to_string(i) + ")");
    }
  }

  auto data = std::make_shared<Data>();
  data->range_max = range_max;
  data->points = std::move(points);

  const std::size_t n = data->points.size();
  std::vector<double> wrapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    wrapped[i] = normalize_angle(data->points[i].bearing);
  }
  data->sorted_order.resize(n);
  std::iota(data->sorted_order.begin(), data->sorted_order.end(), 0u);
  std::stable_sort(data->sorted_order.begin(), data->sorted_order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return wrapped[a] < wrapped[b];
                   });
  data->sorted_bearings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data->sorted_bearings[i] = wrapped[data->sorted_order[i]];
  }
  data_ = std::move(data);
}

Scan Scan::from_ranges(const Pose2& pose, double bearing_origin,
                       double bearing_increment,
                       std::span<const double> ranges, double range_max) {
  if (!(bearing_increment > 0.0)) {
    throw Error("bearing increment must be positive");
  }
  std::vector<PolarPoint> points;
  points.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double r = ranges[i];
    if (!std::isfinite(r) || r <= 0.0 || r > range_max) continue;
    points.push_back(
        {bearing_origin + static_cast<double>(i) * bearing_increment, r});
  }
  return Scan(pose, std::move(points), range_max);
}

Eigen::Vector2d Scan::local_point(std::size_t i) const {
  const PolarPoint& p = data_->points[i];
  return {p.range * std::cos(p.bearing), p.range * std::sin(p.bearing)};
}

Eigen::Vector2d Scan::global_point(std::size_t i) const {
  return pose_ * local_point(i);
}

std::vector<Eigen::Vector2d> Scan::global_points() const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(size());
  const double c = std::cos(pose_.theta);
  const double s = std::sin(pose_.theta);
  for (const PolarPoint& p : data_->points) {
    const double lx = p.range * std::cos(p.bearing);
    const double ly = p.range * std::sin(p.bearing);
    out.emplace_back(pose_.x + c * lx - s * ly, pose_.y + s * lx + c * ly);
  }
  return out;
}

bool Scan::operator==(const Scan& other) const {
  return pose_.x == other.pose_.x && pose_.y == other.pose_.y &&
         pose_.theta == other.pose_.theta &&
         data_->range_max == other.data_->range_max &&
         data_->points == other.data_->points;
}

}  // namespace mergeguard
