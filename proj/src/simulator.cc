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

#include "mergeguard/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mergeguard/error.h"

namespace mergeguard {
namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double snap(double v, double res = 0.05) { return std::round(v / res) * res; }

// Poses every `step` meters along the polyline, starting at its first pose
// and always ending at its last one.
std::vector<Pose2> sample_leg(const std::vector<Pose2>& leg, double step) {
  std::vector<Pose2> out{leg.front()};
  double carry = 0.0;
  for (std::size_t i = 0; i + 1 < leg.size(); ++i) {
    const Pose2& a = leg[i];
    const Pose2& b = leg[i + 1];
    const double length = (b.translation() - a.translation()).norm();
    if (length < 1e-9) continue;
    const double turn = normalize_angle(b.theta - a.theta);
    double s = step - carry;
    for (; s <= length + 1e-12; s += step) {
      const double f = std::min(1.0, s / length);
      const Eigen::Vector2d p = a.translation() + f * (b.translation() - a.translation());
      out.emplace_back(p.x(), p.y(), a.theta + f * turn);
    }
    carry = length - (s - step);
  }
  if (carry > 1e-6) out.push_back(leg.back());
  return out;
}

}  // namespace

void World::validate() const {
  for (const Segment& w : walls) {
    if (!w.a.allFinite() || !w.b.allFinite()) throw Error("world '" + name + "' has a non-finite wall");
    if ((w.b - w.a).norm() < 1e-12) throw Error("world '" + name + "' has a zero-length wall");
  }
}

bool World::inside_bounds(const Eigen::Vector2d& p) const {
  if (walls.empty()) return false;
  Eigen::Vector2d lo = walls.front().a;
  Eigen::Vector2d hi = lo;
  for (const Segment& w : walls) {
    lo = lo.cwiseMin(w.a).cwiseMin(w.b);
    hi = hi.cwiseMax(w.a).cwiseMax(w.b);
  }
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

World world_from_rectangles(std::string name, const std::vector<Rect>& free,
                            const std::vector<Rect>& solid, double resolution) {
  if (free.empty()) throw Error("world needs at least one free rectangle");
  double min_x = free.front().x0, min_y = free.front().y0;
  double max_x = free.front().x1, max_y = free.front().y1;
  for (const Rect& r : free) {
    min_x = std::min(min_x, r.x0);
    min_y = std::min(min_y, r.y0);
    max_x = std::max(max_x, r.x1);
    max_y = std::max(max_y, r.y1);
  }
  const auto i0 = static_cast<std::int64_t>(std::floor(min_x / resolution)) - 2;
  const auto j0 = static_cast<std::int64_t>(std::floor(min_y / resolution)) - 2;
  const auto nx = static_cast<std::int64_t>(std::ceil(max_x / resolution)) + 2 - i0;
  const auto ny = static_cast<std::int64_t>(std::ceil(max_y / resolution)) + 2 - j0;

  std::vector<char> cells(static_cast<std::size_t>(nx * ny), 0);
  for (std::int64_t j = 0; j < ny; ++j) {
    for (std::int64_t i = 0; i < nx; ++i) {
      const Eigen::Vector2d c((i0 + i + 0.5) * resolution, (j0 + j + 0.5) * resolution);
      bool is_free = std::any_of(free.begin(), free.end(), [&](const Rect& r) { return r.contains(c); });
      if (is_free) {
        is_free = std::none_of(solid.begin(), solid.end(), [&](const Rect& r) { return r.contains(c); });
      }
      cells[static_cast<std::size_t>(j * nx + i)] = is_free;
    }
  }
  auto is_free = [&](std::int64_t i, std::int64_t j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
    return cells[static_cast<std::size_t>(j * nx + i)] != 0;
  };

  World world;
  world.name = std::move(name);
  // Horizontal boundaries between rows j-1 and j, merged into runs.
  for (std::int64_t j = 0; j <= ny; ++j) {
    std::int64_t start = -1;
    for (std::int64_t i = 0; i <= nx; ++i) {
      const bool edge = i < nx && is_free(i, j - 1) != is_free(i, j);
      if (edge && start < 0) start = i;
      if (!edge && start >= 0) {
        const double y = (j0 + j) * resolution;
        world.walls.push_back({{(i0 + start) * resolution, y}, {(i0 + i) * resolution, y}});
        start = -1;
      }
    }
  }
  for (std::int64_t i = 0; i <= nx; ++i) {
    std::int64_t start = -1;
    for (std::int64_t j = 0; j <= ny; ++j) {
      const bool edge = j < ny && is_free(i - 1, j) != is_free(i, j);
      if (edge && start < 0) start = j;
      if (!edge && start >= 0) {
        const double x = (i0 + i) * resolution;
        world.walls.push_back({{x, (j0 + start) * resolution}, {x, (j0 + j) * resolution}});
        start = -1;
      }
    }
  }
  return world;
}

void SensorModel::validate() const {
  if (beams < 2) throw Error("sensor needs at least 2 beams");
  if (!(span > 0.0 && span <= 2.0 * kPi + 1e-12)) throw Error("sensor span must lie in (0, 2*pi]");
  if (!(range_max > 0.0)) throw Error("sensor range_max must be positive");
  if (!(range_noise >= 0.0) || !(odometry_noise.array() >= 0.0).all()) {
    throw Error("sensor noise must be non-negative");
  }
}

double SensorModel::bearing_increment() const {
  if (span >= 2.0 * kPi - 1e-12) return 2.0 * kPi / beams;
  return span / (beams - 1);
}

double SensorModel::bearing_origin() const {
  if (span >= 2.0 * kPi - 1e-12) return -kPi + bearing_increment();
  return -0.5 * span;
}

std::optional<double> ray_distance(const World& world, const Eigen::Vector2d& origin,
                                   double angle) {
  const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& w : world.walls) {
    const Eigen::Vector2d e = w.b - w.a;
    const double den = dir.x() * e.y() - dir.y() * e.x();
    if (den == 0.0) continue;
    const Eigen::Vector2d q = w.a - origin;
    const double t = (q.x() * e.y() - q.y() * e.x()) / den;
    const double u = (q.x() * dir.y() - q.y() * dir.x()) / den;
    if (t > 1e-9 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::vector<double> raycast_ranges(const World& world, const Pose2& pose,
                                   const SensorModel& sensor, std::mt19937_64* rng) {
  std::vector<double> ranges(static_cast<std::size_t>(sensor.beams), 0.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double origin = sensor.bearing_origin();
  const double inc = sensor.bearing_increment();
  for (int k = 0; k < sensor.beams; ++k) {
    const auto d = ray_distance(world, pose.translation(), pose.theta + origin + k * inc);
    if (!d || *d > sensor.range_max) continue;
    double r = *d;
    if (rng != nullptr && sensor.range_noise > 0.0) r += sensor.range_noise * noise(*rng);
    ranges[static_cast<std::size_t>(k)] = std::clamp(r, 1e-3, sensor.range_max);
  }
  return ranges;
}

Scan raycast(const World& world, const Pose2& pose, const SensorModel& sensor,
             std::mt19937_64* rng) {
  const auto ranges = raycast_ranges(world, pose, sensor, rng);
  return Scan::from_ranges(pose, sensor.bearing_origin(), sensor.bearing_increment(),
                           ranges, sensor.range_max);
}

void TrajectoryScript::validate(const World& world) const {
  if (waypoints.size() < 2) throw Error("trajectory needs at least 2 waypoints");
  if (!(speed > 0.0) || !(scan_rate > 0.0)) throw Error("speed and scan rate must be positive");
  for (const Pose2& w : waypoints) {
    if (!world.inside_bounds(w.translation())) throw Error("waypoint outside the world");
  }
  std::size_t last = 0;
  for (const KidnapEvent& k : kidnaps) {
    if (k.waypoint >= waypoints.size()) throw Error("kidnap at a missing waypoint");
    if (k.waypoint < last) throw Error("kidnaps must be ordered by waypoint");
    last = k.waypoint;
    if (!world.inside_bounds(k.teleport.translation())) throw Error("kidnap teleport outside the world");
  }
  for (const ScriptedMerge& m : merges) {
    if (m.target_epoch >= m.epoch) throw Error("merge target epoch must precede the trigger epoch");
    if (m.epoch > kidnaps.size()) throw Error("merge in a missing epoch");
  }
}

std::vector<Pose2> heading_waypoints(const std::vector<Eigen::Vector2d>& points) {
  std::vector<Pose2> out;
  double heading = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i + 1 < points.size()) {
      const Eigen::Vector2d d = points[i + 1] - points[i];
      if (d.norm() > 1e-9) heading = std::atan2(d.y(), d.x());
    }
    out.emplace_back(points[i].x(), points[i].y(), heading);
  }
  return out;
}

Scan ScanRecord::to_scan() const {
  return Scan::from_ranges(Pose2(), bearing_origin, bearing_increment, ranges, range_max);
}

std::size_t SequenceLog::scan_count() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const LogRecord& r) {
    return std::holds_alternative<ScanRecord>(r);
  }));
}

std::size_t SequenceLog::epoch_breaks() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const LogRecord& r) {
    return std::holds_alternative<EpochBreak>(r);
  }));
}

std::vector<ForcedMerge> SequenceLog::merges() const {
  std::vector<ForcedMerge> out;
  for (const LogRecord& r : records) {
    if (const auto* m = std::get_if<MergeTrigger>(&r)) out.push_back(m->merge);
  }
  return out;
}

bool SequenceLog::invalid() const {
  for (const ForcedMerge& m : merges()) {
    if (m.invalid) return true;
  }
  return false;
}

SequenceLog run_scenario(const World& world, const TrajectoryScript& script,
                         const SensorModel& sensor, std::uint64_t seed, std::string id) {
  world.validate();
  sensor.validate();
  script.validate(world);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Split the waypoints into one leg per epoch.
  std::vector<std::vector<Pose2>> legs(1);
  std::size_t next_kidnap = 0;
  for (std::size_t i = 0; i < script.waypoints.size(); ++i) {
    legs.back().push_back(script.waypoints[i]);
    while (next_kidnap < script.kidnaps.size() && script.kidnaps[next_kidnap].waypoint == i) {
      legs.push_back({script.kidnaps[next_kidnap].teleport});
      ++next_kidnap;
    }
  }
  const double step = script.speed / script.scan_rate;

  SequenceLog log;
  log.id = std::move(id);
  struct Sample {
    std::size_t ordinal;
    Pose2 truth;
  };
  std::vector<std::vector<Sample>> epochs;
  std::vector<std::vector<std::size_t>> inactive;  // epochs per inactive graph
  std::vector<std::size_t> active;
  std::size_t ordinal = 0;
  for (std::size_t e = 0; e < legs.size(); ++e) {
    const double t_break = static_cast<double>(ordinal) / script.scan_rate;
    if (e > 0) {
      log.records.emplace_back(EpochBreak{t_break});
      if (!active.empty()) inactive.push_back(active);
    }
    active = {e};
    epochs.emplace_back();
    const std::vector<Pose2> poses = sample_leg(legs[e], step);
    for (std::size_t k = 0; k < poses.size(); ++k, ++ordinal) {
      ScanRecord scan;
      scan.t = static_cast<double>(ordinal) / script.scan_rate;
      if (k > 0) {
        const Pose2 d = between(poses[k - 1], poses[k]);
        const Eigen::Vector3d& s = sensor.odometry_noise;
        scan.odometry = Pose2(d.x + (s.x() > 0 ? s.x() * gauss(rng) : 0.0),
                              d.y + (s.y() > 0 ? s.y() * gauss(rng) : 0.0),
                              d.theta + (s.z() > 0 ? s.z() * gauss(rng) : 0.0));
      }
      scan.bearing_origin = sensor.bearing_origin();
      scan.bearing_increment = sensor.bearing_increment();
      scan.ranges = raycast_ranges(world, poses[k], sensor, &rng);
      scan.range_max = sensor.range_max;
      scan.ground_truth = poses[k];
      log.records.emplace_back(std::move(scan));
      epochs.back().push_back({ordinal, poses[k]});

      for (const ScriptedMerge& m : script.merges) {
        if (m.epoch != e || m.scan_in_epoch != k) continue;
        const Pose2 claimed = compose(m.perturbation, poses[k]);
        const std::vector<Sample>& candidates = epochs.at(m.target_epoch);
        const Sample* target = &candidates.front();
        for (const Sample& c : candidates) {
          if (translation_distance(c.truth, claimed) <
              translation_distance(target->truth, claimed)) {
            target = &c;
          }
        }
        std::size_t graph = inactive.size();
        for (std::size_t g = 0; g < inactive.size(); ++g) {
          if (std::count(inactive[g].begin(), inactive[g].end(), m.target_epoch)) graph = g;
        }
        if (graph == inactive.size()) throw Error("scripted merge target epoch is not inactive");
        active.insert(active.end(), inactive[graph].begin(), inactive[graph].end());
        inactive.erase(inactive.begin() + static_cast<std::ptrdiff_t>(graph));

        MergeTrigger trigger;
        trigger.t = scan.t;
        trigger.merge.trigger_scan = ordinal;
        trigger.merge.target_graph = graph;
        trigger.merge.target_scan = target->ordinal;
        trigger.merge.relative_pose = between(target->truth, claimed);
        trigger.merge.invalid = m.invalid;
        log.records.emplace_back(trigger);
      }
    }
  }
  for (const ScriptedMerge& m : script.merges) {
    if (m.epoch >= epochs.size() || m.scan_in_epoch >= epochs[m.epoch].size()) {
      throw Error("scripted merge points past the end of its epoch");
    }
  }
  return log;
}

Scenario crossing_scenario(bool invalid) {
  Scenario s;
  s.id = invalid ? "crossing_invalid" : "crossing_correct";
  s.world = world_from_rectangles(
      "crossing",
      {{-8, -1, 1, 1},      // west arm and crossing
       {-1, -1, 1, 5},      // north arm
       {1, -1, 4, 1},       // east arm
       {-1, -6, 1, -1},     // south arm
       {-3, 5, 3, 10},      // room A
       {4, -3, 10, 3},      // room B
       {-1.5, -13, 1.5, -6}},  // room C
      {{7.5, 1.2, 8.5, 2.2}, {-2.5, 8.5, -1.5, 9.5}});
  s.world.places = {{"crossing", {0, 0}}, {"A", {0, 7.5}}, {"B", {7, 0}}, {"C", {0, -9.5}}};

  const std::vector<Eigen::Vector2d> first{{-6, 0}, {0, 0}, {0, 7.5}, {0, 0}, {7, 0},
                                           {0, 0}, {0, -9.5}, {0, 0}};
  const std::vector<Eigen::Vector2d> second{{-6, 0}, {0, 0}, {7, 0}, {8, -2}, {6, -2}, {6, 2}};
  s.script.waypoints = heading_waypoints(first);
  const auto tail = heading_waypoints(second);
  s.script.kidnaps.push_back({s.script.waypoints.size() - 1, tail.front()});
  s.script.waypoints.insert(s.script.waypoints.end(), tail.begin() + 1, tail.end());

  ScriptedMerge m;
  m.epoch = 1;
  m.scan_in_epoch = 15;  // 6 m at 0.4 m per scan: the crossing centre
  m.target_epoch = 0;
  m.invalid = invalid;
  if (invalid) m.perturbation = rotation_about({0, 0}, -kPi / 2);
  s.script.merges.push_back(m);
  return s;
}

Scenario twin_corridor_scenario(bool invalid) {
  Scenario s;
  s.id = invalid ? "twin_corridors_invalid" : "twin_corridors_correct";
  // Identical dead-end corridors, each with a side passage that turns into a
  // room: a wide hall off A (north), a room split by a partition off B.
  s.world = world_from_rectangles(
      "twin_corridors",
      {{0, 5, 12, 6.6}, {10.6, 6.5, 11.6, 9.4}, {11.5, 8.6, 11.85, 9.3}, {11.75, 8.3, 17, 12},
       {12.3, 5.0, 17, 12},
       {0, 0, 12, 1.6}, {10.6, 1.5, 11.6, 4.4}, {11.5, 3.6, 11.85, 4.3}, {11.75, 1.75, 16.5, 4.6}},
      {{13.0, 2.5, 13.2, 4.7}, {15.2, 2.9, 15.7, 3.4}});
  s.world.places = {{"A", {1.5, 5.8}}, {"B", {1.5, 0.8}}};
  const double shift = 5.0;  // corridor A is corridor B moved north by this
  const std::vector<Eigen::Vector2d> first{{1.5, 5.8}, {11.1, 5.8}, {11.1, 8.95}, {13, 8.95},
                                           {16, 9}, {16, 11}, {12.5, 11}, {12.5, 7.5},
                                           {14.5, 7.5}, {16, 5.8}};
  std::vector<Eigen::Vector2d> second{{1.5, 0.8}, {11.1, 0.8}, {11.1, 3.95}, {12.4, 3.95},
                                      {12.4, 2.1}, {14.2, 2.1}, {14.2, 4.0}, {16, 4.0},
                                      {16, 2.2}, {14.6, 2.2}, {14.6, 3.2}};
  if (!invalid) {
    for (Eigen::Vector2d& p : second) p.y() += shift;
  }
  s.script.waypoints = heading_waypoints(first);
  const auto tail = heading_waypoints(second);
  s.script.kidnaps.push_back({s.script.waypoints.size() - 1, tail.front()});
  s.script.waypoints.insert(s.script.waypoints.end(), tail.begin() + 1, tail.end());
  ScriptedMerge m;
  m.epoch = 1;
  m.scan_in_epoch = 3;
  m.invalid = invalid;
  if (invalid) m.perturbation = Pose2(0.0, shift, 0.0);
  s.script.merges.push_back(m);
  return s;
}

Scenario symmetric_room_scenario(bool invalid) {
  Scenario s;
  s.id = invalid ? "symmetric_room_invalid" : "symmetric_room_correct";
  s.world = world_from_rectangles(
      "symmetric_room", {{-5, -3, 5, 3}, {2, 2.9, 3, 3.2}, {1.5, 3.15, 3.5, 5}},
      {{-4.0, -2.4, -1.5, -1.6}, {1.0, -2.4, 2.2, -1.3}});
  s.world.places = {{"centre", {0, 0}}, {"closet", {2.5, 4}}};
  const std::vector<Eigen::Vector2d> first{{-4, -0.3}, {-4, 2}, {4, 2}, {4, -0.5}, {-0.5, -0.5},
                                           {-4, -0.3}, {2.5, 2.0}, {2.5, 4.0}, {2.5, 2.0}};
  const std::vector<Eigen::Vector2d> second{{-3.5, 0.5}, {3.5, 0.5}, {3.5, -0.8}, {-1.5, -0.8}, {-4.2, 1.5}};
  s.script.waypoints = heading_waypoints(first);
  const auto tail = heading_waypoints(second);
  s.script.kidnaps.push_back({s.script.waypoints.size() - 1, tail.front()});
  s.script.waypoints.insert(s.script.waypoints.end(), tail.begin() + 1, tail.end());
  ScriptedMerge m;
  m.epoch = 1;
  m.scan_in_epoch = 3;
  m.invalid = invalid;
  if (invalid) m.perturbation = rotation_about({0, 0}, kPi);
  s.script.merges.push_back(m);
  return s;
}

Scenario flats_scenario(std::uint64_t seed, bool invalid) {
  std::mt19937_64 rng(seed);
  Scenario s;
  s.id = std::string(invalid ? "flats_invalid_" : "flats_correct_") + std::to_string(seed);

  const double length = snap(uniform(rng, 18.0, 26.0));
  const double width = snap(uniform(rng, 1.6, 2.4));
  std::vector<Rect> free{{0, 0, length, width}};
  std::vector<Rect> solid;
  struct Door {
    double x;       // door centre
    double inside;  // y of a point inside the room
  };
  std::vector<Door> doors;
  for (int side = 0; side < 2; ++side) {
    const bool north = side == 0;
    double x = snap(uniform(rng, 0.0, 1.0));
    while (x + 2.5 < length) {
      double w = snap(uniform(rng, 2.5, 5.0));
      if (x + w > length) w = length - x;
      const double depth = snap(uniform(rng, 3.0, 5.0));
      const double x0 = x + 0.1;
      const double x1 = x + w - 0.1;
      const double near = north ? width + 0.15 : -0.15;
      const double far = north ? near + depth : near - depth;
      free.push_back({x0, std::min(near, far), x1, std::max(near, far)});
      const double door_w = snap(uniform(rng, 0.9, 1.3));
      const double dx = snap(uniform(rng, x0 + 0.3, x1 - 0.3 - door_w));
      if (north) {
        free.push_back({dx, width - 0.05, dx + door_w, width + 0.2});
      } else {
        free.push_back({dx, -0.2, dx + door_w, 0.05});
      }
      doors.push_back({dx + 0.5 * door_w, near + (far - near) * 0.4});
      const int boxes = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int b = 0; b < boxes; ++b) {
        const double bw = snap(uniform(rng, 0.4, 1.0));
        const double bh = snap(uniform(rng, 0.4, 1.0));
        const double bx = snap(uniform(rng, x0 + 0.3, x1 - 0.3 - bw));
        // Far half of the room, clear of the door path.
        const double mid = near + (far - near) * 0.6;
        const double edge = far - (north ? 0.3 : -0.3);
        const double lo = std::min(mid, edge);
        const double hi = std::max(mid, edge) - bh;
        if (hi <= lo) continue;
        const double by = snap(uniform(rng, lo, hi));
        solid.push_back({bx, by, bx + bw, by + bh});
      }
      x += w;
    }
  }
  s.world = world_from_rectangles("flats", free, solid);
  std::sort(doors.begin(), doors.end(), [](const Door& a, const Door& b) { return a.x < b.x; });

  const double mid = 0.5 * width;
  std::vector<Eigen::Vector2d> first{{0.8, mid}};
  for (const Door& d : doors) {
    if (uniform(rng, 0.0, 1.0) > 0.8) continue;
    first.push_back({d.x, mid});
    first.push_back({d.x, d.inside});
    first.push_back({d.x, mid});
  }
  first.push_back({length - 0.8, mid});

  const double start_x = snap(uniform(rng, 2.0, length - 12.0));
  const double y = mid + uniform(rng, -0.1, 0.1);
  std::vector<Eigen::Vector2d> second{{start_x, y}};
  const auto next = std::find_if(doors.begin(), doors.end(), [&](const Door& d) {
    return d.x > start_x + 3.0 && d.x < length - 1.0;
  });
  if (next != doors.end()) {
    second.push_back({next->x, y});
    second.push_back({next->x, next->inside});
    second.push_back({next->x, y});
    second.push_back({std::min(next->x + 3.0, length - 0.8), y});
  } else {
    second.push_back({length - 0.8, y});
  }

  s.script.waypoints = heading_waypoints(first);
  const auto tail = heading_waypoints(second);
  s.script.kidnaps.push_back({s.script.waypoints.size() - 1, tail.front()});
  s.script.waypoints.insert(s.script.waypoints.end(), tail.begin() + 1, tail.end());

  ScriptedMerge m;
  m.epoch = 1;
  m.scan_in_epoch = 3;
  m.invalid = invalid;
  if (invalid) {
    const double step = s.script.speed / s.script.scan_rate;
    const Eigen::Vector2d trigger = second[0] + (second[1] - second[0]).normalized() * 3 * step;
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {
        const double d = uniform(rng, 1.5, 4.0);
        m.perturbation = Pose2(uniform(rng, 0.0, 1.0) < 0.5 ? -d : d, 0.0, 0.0);
        break;
      }
      case 1:
        m.perturbation = rotation_about(trigger, kPi);
        break;
      default:
        m.perturbation = rotation_about(trigger, uniform(rng, 0.0, 1.0) < 0.5 ? kPi / 2 : -kPi / 2);
        break;
    }
  }
  s.script.merges.push_back(m);
  return s;
}

Scenario named_scenario(const std::string& world, bool invalid, std::uint64_t seed) {
  if (world == "crossing") return crossing_scenario(invalid);
  if (world == "twin_corridors") return twin_corridor_scenario(invalid);
  if (world == "symmetric_room") return symmetric_room_scenario(invalid);
  if (world == "flats") return flats_scenario(seed, invalid);
  throw Error("unknown world '" + world + "'");
}

std::vector<Scenario> suite_scenarios(const SuiteOptions& options) {
  std::vector<Scenario> out;
  if (options.scripted) {
    for (bool invalid : {false, true}) {
      out.push_back(crossing_scenario(invalid));
      out.push_back(twin_corridor_scenario(invalid));
      out.push_back(symmetric_room_scenario(invalid));
    }
  }
  for (std::size_t i = 0; i < options.flats_correct; ++i) {
    out.push_back(flats_scenario(options.seed * 100000 + i, false));
  }
  for (std::size_t i = 0; i < options.flats_invalid; ++i) {
    out.push_back(flats_scenario(options.seed * 100000 + 50000 + i, true));
  }
  return out;
}

}  // namespace mergeguard
