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

#ifndef MERGEGUARD_POSE2_H_
#define MERGEGUARD_POSE2_H_

#include <Eigen/Core>

namespace mergeguard {

// Wraps an angle to (-pi, pi].
double normalize_angle(double angle);

// Rigid transform in the plane. theta is kept normalized to (-pi, pi].
struct Pose2 {
  Pose2() = default;
  Pose2(double x, double y, double theta);

  Eigen::Vector2d translation() const { return {x, y}; }
  Eigen::Matrix2d rotation() const;

  // Maps a point expressed in this frame into the parent frame.
  Eigen::Vector2d operator*(const Eigen::Vector2d& point) const;

  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);

// inverse(a) * b: pose of b expressed in the frame of a.
Pose2 between(const Pose2& a, const Pose2& b);

// Rotation of `angle` about `center`, as a rigid transform.
Pose2 rotation_about(const Eigen::Vector2d& center, double angle);

// Absolute translation and rotation difference between two poses.
double translation_distance(const Pose2& a, const Pose2& b);
double rotation_distance(const Pose2& a, const Pose2& b);

}  // namespace mergeguard

#endif  // MERGEGUARD_POSE2_H_
