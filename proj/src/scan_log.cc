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

#include "mergeguard/scan_log.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mergeguard/error.h"

namespace mergeguard {
namespace {

using nlohmann::json;

json pose_json(const Pose2& p) { return json::array({p.x, p.y, p.theta}); }

Pose2 pose_from(const json& j, const char* field) {
  const json& v = j.at(field);
  if (!v.is_array() || v.size() != 3) throw Error(std::string("'") + field + "' must hold 3 numbers");
  return Pose2(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

json merge_json(double t, const ForcedMerge& m) {
  json info = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) info.push_back(m.information(r, c));
  }
  return json{{"type", "merge_trigger"},
              {"t", t},
              {"trigger_scan", m.trigger_scan},
              {"target_graph", m.target_graph},
              {"target_scan", m.target_scan},
              {"rel", pose_json(m.relative_pose)},
              {"info", info},
              {"label", m.invalid ? "invalid" : "correct"}};
}

MergeTrigger merge_from(const json& j) {
  MergeTrigger out;
  out.t = j.at("t").get<double>();
  out.merge.trigger_scan = j.at("trigger_scan").get<std::size_t>();
  out.merge.target_graph = j.at("target_graph").get<std::size_t>();
  out.merge.target_scan = j.at("target_scan").get<std::size_t>();
  out.merge.relative_pose = pose_from(j, "rel");
  if (j.contains("info")) {
    const json& info = j.at("info");
    if (!info.is_array() || info.size() != 9) throw Error("'info' must hold 9 numbers");
    for (int k = 0; k < 9; ++k) out.merge.information(k / 3, k % 3) = info[k].get<double>();
  }
  const std::string label = j.value("label", "correct");
  if (label != "correct" && label != "invalid") throw Error("label must be 'correct' or 'invalid'");
  out.merge.invalid = label == "invalid";
  return out;
}

json record_json(const LogRecord& record) {
  if (const auto* s = std::get_if<ScanRecord>(&record)) {
    json j{{"type", "scan"},
           {"t", s->t},
           {"odom", pose_json(s->odometry)},
           {"bearing_origin", s->bearing_origin},
           {"bearing_increment", s->bearing_increment},
           {"range_max", s->range_max},
           {"ranges", s->ranges}};
    if (s->ground_truth) j["gt"] = pose_json(*s->ground_truth);
    return j;
  }
  if (const auto* b = std::get_if<EpochBreak>(&record)) {
    return json{{"type", "epoch_break"}, {"t", b->t}};
  }
  const auto& m = std::get<MergeTrigger>(record);
  return merge_json(m.t, m.merge);
}

LogRecord record_from(const json& j) {
  if (!j.is_object()) throw Error("record is not an object");
  const std::string type = j.at("type").get<std::string>();
  if (type == "scan") {
    ScanRecord s;
    s.t = j.at("t").get<double>();
    s.odometry = pose_from(j, "odom");
    s.bearing_origin = j.at("bearing_origin").get<double>();
    s.bearing_increment = j.at("bearing_increment").get<double>();
    s.range_max = j.at("range_max").get<double>();
    s.ranges = j.at("ranges").get<std::vector<double>>();
    if (!(s.bearing_increment > 0.0)) throw Error("bearing_increment must be positive");
    if (j.contains("gt")) s.ground_truth = pose_from(j, "gt");
    return s;
  }
  if (type == "epoch_break") return EpochBreak{j.at("t").get<double>()};
  if (type == "merge_trigger") return merge_from(j);
  throw Error("unknown record type '" + type + "'");
}

// Calls f(json, line_number) for every non-blank line.
template <typename F>
void for_each_record(std::istream& in, F&& f) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(json::parse(line));
    } catch (const std::exception& e) {
      throw Error("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return in;
}

Rect rect_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("rectangles hold 4 numbers");
  return Rect{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Eigen::Vector2d point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("points hold 2 numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

World world_from(const json& j) {
  const std::string name = j.value("name", "world");
  World w;
  if (j.contains("rectangles")) {
    if (j.contains("walls")) throw Error("world has both 'walls' and 'rectangles'");
    const json& r = j.at("rectangles");
    std::vector<Rect> free, solid;
    for (const json& x : r.at("free")) free.push_back(rect_from(x));
    if (r.contains("solid")) {
      for (const json& x : r.at("solid")) solid.push_back(rect_from(x));
    }
    w = world_from_rectangles(name, free, solid, j.value("resolution", 0.05));
  } else {
    w.name = name;
    for (const json& x : j.at("walls")) {
      const Rect r = rect_from(x);
      w.walls.push_back({{r.x0, r.y0}, {r.x1, r.y1}});
    }
  }
  if (j.contains("places")) {
    for (const auto& [key, value] : j.at("places").items()) w.places[key] = point_from(value);
  }
  w.validate();
  return w;
}

TrajectoryScript script_from(const json& j) {
  TrajectoryScript s;
  for (const json& p : j.at("waypoints")) {
    if (p.is_array() && p.size() == 2) {
      s.waypoints.emplace_back(p[0].get<double>(), p[1].get<double>(), 0.0);
    } else {
      s.waypoints.push_back(pose_from(json{{"p", p}}, "p"));
    }
  }
  if (j.value("auto_heading", false)) {
    std::vector<Eigen::Vector2d> points;
    for (const Pose2& p : s.waypoints) points.push_back(p.translation());
    s.waypoints = heading_waypoints(points);
  }
  s.speed = j.value("speed", s.speed);
  s.scan_rate = j.value("scan_rate", s.scan_rate);
  for (const json& k : j.value("kidnaps", json::array())) {
    s.kidnaps.push_back({k.at("waypoint").get<std::size_t>(), pose_from(k, "teleport")});
  }
  for (const json& m : j.value("merges", json::array())) {
    ScriptedMerge merge;
    merge.epoch = m.value("epoch", merge.epoch);
    merge.scan_in_epoch = m.at("scan_in_epoch").get<std::size_t>();
    merge.target_epoch = m.value("target_epoch", merge.target_epoch);
    if (m.contains("perturbation")) merge.perturbation = pose_from(m, "perturbation");
    merge.invalid = m.value("invalid", false);
    s.merges.push_back(merge);
  }
  return s;
}

}  // namespace

void write_scan_log(std::ostream& out, const SequenceLog& log) {
  for (const LogRecord& r : log.records) out << record_json(r).dump() << '\n';
}

std::string serialize_scan_log(const SequenceLog& log) {
  std::ostringstream out;
  write_scan_log(out, log);
  return out.str();
}

void write_scan_log_file(const std::filesystem::path& path, const SequenceLog& log) {
  auto out = open_out(path);
  write_scan_log(out, log);
  if (!out) throw Error("failed writing " + path.string());
}

SequenceLog read_scan_log(std::istream& in, std::string id) {
  SequenceLog log;
  log.id = std::move(id);
  for_each_record(in, [&](const json& j) { log.records.push_back(record_from(j)); });
  return log;
}

SequenceLog ingest_log(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_scan_log(in, path.stem().string());
}

void write_merge_spec(std::ostream& out, const std::vector<ForcedMerge>& merges) {
  for (const ForcedMerge& m : merges) out << merge_json(0.0, m).dump() << '\n';
}

void write_merge_spec_file(const std::filesystem::path& path,
                           const std::vector<ForcedMerge>& merges) {
  auto out = open_out(path);
  write_merge_spec(out, merges);
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<ForcedMerge> read_merge_spec(std::istream& in) {
  std::vector<ForcedMerge> out;
  for_each_record(in, [&](const json& j) {
    if (j.value("type", "merge_trigger") != "merge_trigger") {
      throw Error("merge specs hold only merge_trigger records");
    }
    json full = j;
    full["type"] = "merge_trigger";
    if (!full.contains("t")) full["t"] = 0.0;
    out.push_back(merge_from(full).merge);
  });
  return out;
}

std::vector<ForcedMerge> read_merge_spec_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_merge_spec(in);
}

SequenceLog with_merges(const SequenceLog& log, const std::vector<ForcedMerge>& merges) {
  SequenceLog out;
  out.id = log.id;
  std::size_t ordinal = 0;
  for (const LogRecord& r : log.records) {
    if (std::holds_alternative<MergeTrigger>(r)) continue;
    out.records.push_back(r);
    if (const auto* s = std::get_if<ScanRecord>(&r)) {
      for (const ForcedMerge& m : merges) {
        if (m.trigger_scan == ordinal) out.records.emplace_back(MergeTrigger{s->t, m});
      }
      ++ordinal;
    }
  }
  for (const ForcedMerge& m : merges) {
    if (m.trigger_scan >= ordinal) {
      throw Error("merge triggers on scan " + std::to_string(m.trigger_scan) +
                  " but the log has " + std::to_string(ordinal) + " scans");
    }
  }
  return out;
}

Scenario parse_scenario(const std::string& text) {
  try {
    const json j = json::parse(text);
    Scenario s;
    s.id = j.value("id", "scenario");
    s.world = world_from(j.at("world"));
    s.script = script_from(j.at("script"));
    s.script.validate(s.world);
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
}

Scenario read_scenario_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream text;
  text << in.rdbuf();
  Scenario s = parse_scenario(text.str());
  if (!json::parse(text.str()).contains("id")) s.id = path.stem().string();
  return s;
}

std::string dump_scenario(const Scenario& scenario) {
  json walls = json::array();
  for (const Segment& w : scenario.world.walls) walls.push_back({w.a.x(), w.a.y(), w.b.x(), w.b.y()});
  json places = json::object();
  for (const auto& [name, p] : scenario.world.places) places[name] = {p.x(), p.y()};
  json waypoints = json::array();
  for (const Pose2& p : scenario.script.waypoints) waypoints.push_back(pose_json(p));
  json kidnaps = json::array();
  for (const KidnapEvent& k : scenario.script.kidnaps) {
    kidnaps.push_back({{"waypoint", k.waypoint}, {"teleport", pose_json(k.teleport)}});
  }
  json merges = json::array();
  for (const ScriptedMerge& m : scenario.script.merges) {
    merges.push_back({{"epoch", m.epoch},
                      {"scan_in_epoch", m.scan_in_epoch},
                      {"target_epoch", m.target_epoch},
                      {"perturbation", pose_json(m.perturbation)},
                      {"invalid", m.invalid}});
  }
  const json j{{"id", scenario.id},
               {"world", {{"name", scenario.world.name}, {"walls", walls}, {"places", places}}},
               {"script",
                {{"waypoints", waypoints},
                 {"speed", scenario.script.speed},
                 {"scan_rate", scenario.script.scan_rate},
                 {"kidnaps", kidnaps},
                 {"merges", merges}}}};
  return j.dump(1) + "\n";
}

}  // namespace mergeguard
