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

#ifndef MERGEGUARD_SIMULATOR_H_
#define MERGEGUARD_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/merge_manager.h"
#include "mergeguard/pose2.h"
#include "mergeguard/scan.h"

namespace mergeguard {

struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
};

struct World {
  std::string name;
  std::vector<Segment> walls;
  std::map<std::string, Eigen::Vector2d> places;

  // Throws Error on non-finite or zero-length walls.
  void validate() const;
  bool inside_bounds(const Eigen::Vector2d& p) const;
};

// Walls along the boundary of (union of `free`) minus (union of `solid`),
// traced on a lattice of the given resolution.
World world_from_rectangles(std::string name, const std::vector<Rect>& free,
                            const std::vector<Rect>& solid = {},
                            double resolution = 0.05);

struct SensorModel {
  int beams = 360;
  double span = 2.0 * std::numbers::pi;
  double range_max = 10.0;
  double range_noise = 0.01;                        // meters
  Eigen::Vector3d odometry_noise{0.0025, 0.00125, 0.00075};  // per step (m, m, rad)

  void validate() const;
  double bearing_origin() const;
  double bearing_increment() const;
};

// Distance along the ray to the nearest wall, if any.
std::optional<double> ray_distance(const World& world, const Eigen::Vector2d& origin,
                                   double angle);

// One range per beam, 0 for beams without a hit. Noise is added when `rng`
// is given; noisy ranges are clipped to (0, range_max].
std::vector<double> raycast_ranges(const World& world, const Pose2& pose,
                                   const SensorModel& sensor,
                                   std::mt19937_64* rng = nullptr);

Scan raycast(const World& world, const Pose2& pose, const SensorModel& sensor,
             std::mt19937_64* rng = nullptr);

struct KidnapEvent {
  std::size_t waypoint = 0;  // kidnapped on reaching this waypoint
  Pose2 teleport;
};

// Forced merge of the k-th scan of one epoch into an earlier epoch. The
// claimed trigger pose is perturbation * (true trigger pose); the target is
// the target-epoch scan closest to the claimed pose.
struct ScriptedMerge {
  std::size_t epoch = 1;
  std::size_t scan_in_epoch = 0;
  std::size_t target_epoch = 0;
  Pose2 perturbation;
  bool invalid = false;
};

struct TrajectoryScript {
  std::vector<Pose2> waypoints;
  double speed = 0.8;      // m/s
  double scan_rate = 2.0;  // Hz
  std::vector<KidnapEvent> kidnaps;
  std::vector<ScriptedMerge> merges;

  void validate(const World& world) const;
};

// Waypoints through the points, each heading toward the next point.
std::vector<Pose2> heading_waypoints(const std::vector<Eigen::Vector2d>& points);

struct ScanRecord {
  double t = 0.0;
  Pose2 odometry;  // body-frame motion since the previous scan
  double bearing_origin = 0.0;
  double bearing_increment = 0.0;
  std::vector<double> ranges;  // 0 means no return
  double range_max = 0.0;
  std::optional<Pose2> ground_truth;

  Scan to_scan() const;
};

struct EpochBreak {
  double t = 0.0;
};

struct MergeTrigger {
  double t = 0.0;
  ForcedMerge merge;
};

using LogRecord = std::variant<ScanRecord, EpochBreak, MergeTrigger>;

struct SequenceLog {
  std::string id;
  std::vector<LogRecord> records;

  std::size_t scan_count() const;
  std::size_t epoch_breaks() const;
  std::vector<ForcedMerge> merges() const;
  // True when any forced merge is labelled invalid.
  bool invalid() const;
};

// Deterministic in (world, script, sensor, seed).
SequenceLog run_scenario(const World& world, const TrajectoryScript& script,
                         const SensorModel& sensor, std::uint64_t seed,
                         std::string id = "sequence");

struct Scenario {
  std::string id;
  World world;
  TrajectoryScript script;
};

// Four-way crossing with rooms A (north), B (east) and C (south). The
// invalid variant claims a 90 degree clockwise turn about the crossing.
Scenario crossing_scenario(bool invalid);
// Two identical corridors ending in different rooms; the invalid variant
// claims the robot is in the other corridor.
Scenario twin_corridor_scenario(bool invalid);
// Nearly point-symmetric room; the invalid variant claims a half turn about
// its centre.
Scenario symmetric_room_scenario(bool invalid);
// Random hallway flat. Invalid merges shift along the hallway by 1.5-4 m,
// or turn 90 or 180 degrees about the trigger point.
Scenario flats_scenario(std::uint64_t seed, bool invalid);

Scenario named_scenario(const std::string& world, bool invalid, std::uint64_t seed);

struct SuiteOptions {
  std::size_t flats_correct = 30;
  std::size_t flats_invalid = 30;
  bool scripted = true;  // the three scripted worlds, both variants
  std::uint64_t seed = 1;
};

std::vector<Scenario> suite_scenarios(const SuiteOptions& options);

}  // namespace mergeguard

#endif  // MERGEGUARD_SIMULATOR_H_
