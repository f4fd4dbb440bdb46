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

#include "mergeguard/pose2.h"

#include <cmath>
#include <numbers>

namespace mergeguard {

double normalize_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

Pose2::Pose2(double x, double y, double theta)
    : x(x), y(y), theta(normalize_angle(theta)) {}

Eigen::Matrix2d Pose2::rotation() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Vector2d Pose2::operator*(const Eigen::Vector2d& point) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {x + c * point.x() - s * point.y(), y + s * point.x() + c * point.y()};
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2(a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y,
               a.theta + b.theta);
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2(-c * a.x - s * a.y, s * a.x - c * a.y, -a.theta);
}

Pose2 between(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return Pose2(c * dx + s * dy, -s * dx + c * dy, b.theta - a.theta);
}

Pose2 rotation_about(const Eigen::Vector2d& center, double angle) {
  // p -> R (p - c) + c
  const Pose2 rotate(0.0, 0.0, angle);
  const Eigen::Vector2d t = center - rotate * center;
  return Pose2(t.x(), t.y(), angle);
}

double translation_distance(const Pose2& a, const Pose2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double rotation_distance(const Pose2& a, const Pose2& b) {
  return std::abs(normalize_angle(a.theta - b.theta));
}

}  // namespace mergeguard
