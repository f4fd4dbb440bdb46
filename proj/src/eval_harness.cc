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

#include "mergeguard/eval_harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mergeguard/error.h"
#include "mergeguard/optimizer.h"
#include "mergeguard/serialization.h"

namespace mergeguard {
namespace {

using nlohmann::json;

// Reads known keys of one JSON object and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error("config '" + where_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error("config '" + where_ + "." + key + "': " + e.what());
    }
  }

  void get_vec3(const char* key, Eigen::Vector3d& out) {
    std::vector<double> v{out.x(), out.y(), out.z()};
    get(key, v);
    if (v.size() != 3) throw Error("config '" + where_ + "." + key + "' must hold 3 numbers");
    out = {v[0], v[1], v[2]};
  }

  const json* object(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void done() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw Error("unknown config key '" + where_ + "." + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

const std::vector<std::string>& known_detectors() {
  static const std::vector<std::string> names{"change", "gridmap", "entropy", "histogram"};
  return names;
}

void HarnessConfig::validate() const {
  for (const auto* list : {&detectors, &live_detectors}) {
    std::set<std::string> seen;
    for (const std::string& d : *list) {
      if (std::find(known_detectors().begin(), known_detectors().end(), d) == known_detectors().end()) {
        throw Error("unknown detector '" + d + "'");
      }
      if (!seen.insert(d).second) throw Error("detector '" + d + "' listed twice");
    }
  }
  change.validate();
  entropy.validate();
  histogram.validate();
  GridmapDetector{gridmap};
  sensor.validate();
  if (!(front_end.odometry_sigma.array() > 0.0).all()) throw Error("odometry sigma must be positive");
  if (!(front_end.loop_max_distance >= 0.0) || !(front_end.loop_information > 0.0)) {
    throw Error("invalid loop closure settings");
  }
}

HarnessConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  HarnessConfig c;
  Fields f(root, "config");
  f.get("detectors", c.detectors);
  f.get("live_detectors", c.live_detectors);
  f.get("seed", c.seed);
  f.get("threads", c.threads);
  if (const json* j = f.object("change")) {
    Fields g(*j, "change");
    g.get("t_r", c.change.t_r);
    g.get("t_alpha", c.change.t_alpha);
    g.get("n_recent", c.change.n_recent);
    g.get("tau_overlap", c.change.tau_overlap);
    g.get("visibility_cell_size", c.change.visibility_cell_size);
    g.get("t_unmerge", c.change.t_unmerge);
    g.get("cache_invalidate_trans", c.change.cache_invalidate_trans);
    g.get("cache_invalidate_rot", c.change.cache_invalidate_rot);
    g.done();
  }
  if (const json* j = f.object("gridmap")) {
    Fields g(*j, "gridmap");
    g.get("cell_size", c.gridmap.cell_size);
    g.get("n_recent", c.gridmap.n_recent);
    g.get("dilation_half_width", c.gridmap.dilation_half_width);
    g.get("tau_overlap_cells", c.gridmap.tau_overlap_cells);
    g.get("t_unmerge", c.gridmap.t_unmerge);
    g.done();
  }
  if (const json* j = f.object("entropy")) {
    Fields g(*j, "entropy");
    g.get("radius", c.entropy.radius);
    g.get("min_neighbors", c.entropy.min_neighbors);
    std::string formula(to_string(c.entropy.delta_formula));
    g.get("delta_formula", formula);
    c.entropy.delta_formula = delta_formula_from_string(formula);
    g.get("t_unmerge", c.entropy.t_unmerge);
    g.done();
  }
  if (const json* j = f.object("histogram")) {
    Fields g(*j, "histogram");
    g.get("cell_size", c.histogram.cell_size);
    g.get("n_recent", c.histogram.n_recent);
    g.get("t_unmerge", c.histogram.t_unmerge);
    g.done();
  }
  if (const json* j = f.object("front_end")) {
    Fields g(*j, "front_end");
    g.get_vec3("odometry_sigma", c.front_end.odometry_sigma);
    g.get("loop_closures", c.front_end.loop_closures);
    g.get("loop_min_gap", c.front_end.loop_min_gap);
    g.get("loop_max_distance", c.front_end.loop_max_distance);
    g.get("loop_min_interval", c.front_end.loop_min_interval);
    g.get("loop_information", c.front_end.loop_information);
    g.done();
  }
  if (const json* j = f.object("merge")) {
    Fields g(*j, "merge");
    g.get("max_iterations", c.merge.optimizer.max_iterations);
    g.get("tolerance", c.merge.optimizer.tolerance);
    g.get("initial_damping", c.merge.optimizer.initial_damping);
    g.get("spill_threshold_vertices", c.merge.spill_threshold_vertices);
    std::string spill = c.merge.spill_directory.string();
    g.get("spill_directory", spill);
    c.merge.spill_directory = spill;
    g.done();
  }
  if (const json* j = f.object("sensor")) {
    Fields g(*j, "sensor");
    g.get("beams", c.sensor.beams);
    g.get("span", c.sensor.span);
    g.get("range_max", c.sensor.range_max);
    g.get("range_noise", c.sensor.range_noise);
    g.get_vec3("odometry_noise", c.sensor.odometry_noise);
    g.done();
  }
  if (const json* j = f.object("suite")) {
    Fields g(*j, "suite");
    g.get("flats_correct", c.suite.flats_correct);
    g.get("flats_invalid", c.suite.flats_invalid);
    g.get("scripted", c.suite.scripted);
    g.get("seed", c.suite.seed);
    g.done();
  }
  f.done();
  c.validate();
  return c;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const HarnessConfig& c) {
  json j;
  j["detectors"] = c.detectors;
  j["live_detectors"] = c.live_detectors;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["change"] = {{"t_r", c.change.t_r},
                 {"t_alpha", c.change.t_alpha},
                 {"n_recent", c.change.n_recent},
                 {"tau_overlap", c.change.tau_overlap},
                 {"visibility_cell_size", c.change.visibility_cell_size},
                 {"t_unmerge", c.change.t_unmerge},
                 {"cache_invalidate_trans", c.change.cache_invalidate_trans},
                 {"cache_invalidate_rot", c.change.cache_invalidate_rot}};
  j["gridmap"] = {{"cell_size", c.gridmap.cell_size},
                  {"n_recent", c.gridmap.n_recent},
                  {"dilation_half_width", c.gridmap.dilation_half_width},
                  {"tau_overlap_cells", c.gridmap.tau_overlap_cells},
                  {"t_unmerge", c.gridmap.t_unmerge}};
  j["entropy"] = {{"radius", c.entropy.radius},
                  {"min_neighbors", c.entropy.min_neighbors},
                  {"delta_formula", std::string(to_string(c.entropy.delta_formula))},
                  {"t_unmerge", c.entropy.t_unmerge}};
  j["histogram"] = {{"cell_size", c.histogram.cell_size},
                    {"n_recent", c.histogram.n_recent},
                    {"t_unmerge", c.histogram.t_unmerge}};
  j["front_end"] = {{"odometry_sigma", vec3(c.front_end.odometry_sigma)},
                    {"loop_closures", c.front_end.loop_closures},
                    {"loop_min_gap", c.front_end.loop_min_gap},
                    {"loop_max_distance", c.front_end.loop_max_distance},
                    {"loop_min_interval", c.front_end.loop_min_interval},
                    {"loop_information", c.front_end.loop_information}};
  j["merge"] = {{"max_iterations", c.merge.optimizer.max_iterations},
                {"tolerance", c.merge.optimizer.tolerance},
                {"initial_damping", c.merge.optimizer.initial_damping},
                {"spill_threshold_vertices", c.merge.spill_threshold_vertices},
                {"spill_directory", c.merge.spill_directory.string()}};
  j["sensor"] = {{"beams", c.sensor.beams},
                 {"span", c.sensor.span},
                 {"range_max", c.sensor.range_max},
                 {"range_noise", c.sensor.range_noise},
                 {"odometry_noise", vec3(c.sensor.odometry_noise)}};
  j["suite"] = {{"flats_correct", c.suite.flats_correct},
                {"flats_invalid", c.suite.flats_invalid},
                {"scripted", c.suite.scripted},
                {"seed", c.suite.seed}};
  return j.dump(2) + "\n";
}

std::unique_ptr<Detector> make_detector(const std::string& name, const HarnessConfig& config) {
  if (name == "change") return std::make_unique<ChangeDetector>(config.change);
  if (name == "gridmap") return std::make_unique<GridmapDetector>(config.gridmap);
  if (name == "entropy") return std::make_unique<EntropyDetector>(config.entropy);
  if (name == "histogram") return std::make_unique<HistogramDetector>(config.histogram);
  throw Error("unknown detector '" + name + "'");
}

FrontEnd::FrontEnd(const HarnessConfig& config) : config_(config) { store_.begin_epoch(); }

FrontEnd::Step FrontEnd::process(const LogRecord& record) {
  Step step;
  if (std::holds_alternative<EpochBreak>(record)) {
    store_.begin_epoch();
    epoch_truth_.clear();
    last_closure_.reset();
    return step;
  }
  if (const auto* trigger = std::get_if<MergeTrigger>(&record)) {
    const MergeSchedule schedule({trigger->merge});
    apply_candidates(store_, schedule.find_merge_candidates(store_, trigger->merge.trigger_scan, vertex_of_scan_),
                     config_.merge);
    step.merged = true;
    return step;
  }
  const auto& scan = std::get<ScanRecord>(record);
  const Eigen::Vector3d inv = config_.front_end.odometry_sigma.array().square().inverse();
  const VertexId v = store_.add_vertex(scan.to_scan(), scan.odometry, inv.asDiagonal().toDenseMatrix());
  vertex_of_scan_[scans_] = v;
  if (scan.ground_truth) {
    close_loop(v, *scan.ground_truth);
    epoch_truth_.push_back({v, scans_, *scan.ground_truth});
  }
  ++scans_;
  step.vertex = v;
  return step;
}

void FrontEnd::close_loop(VertexId vertex, const Pose2& truth) {
  const FrontEndConfig& fe = config_.front_end;
  if (!fe.loop_closures) return;
  if (last_closure_ && scans_ - *last_closure_ < fe.loop_min_interval) return;
  const Truth* best = nullptr;
  double best_distance = fe.loop_max_distance;
  for (const Truth& t : epoch_truth_) {
    if (scans_ - t.scan < fe.loop_min_gap || !store_.active().contains(t.vertex)) continue;
    const double d = translation_distance(t.pose, truth);
    if (d <= best_distance) {
      best = &t;
      best_distance = d;
    }
  }
  if (best == nullptr) return;
  Edge edge{best->vertex, vertex, EdgeKind::kLoopClosure, between(best->pose, truth),
            Eigen::Matrix3d::Identity() * fe.loop_information};
  store_.mutable_active().add_edge(edge);
  optimize(store_.mutable_active(), {reference_vertex(store_)}, config_.merge.optimizer);
  last_closure_ = scans_;
  ++loop_closures_;
}

SequenceResult run_sequence(const SequenceLog& log, const HarnessConfig& config) {
  if (log.merges().empty()) throw Error("sequence '" + log.id + "' has no merge trigger");
  std::vector<std::unique_ptr<Detector>> detectors;
  for (const std::string& name : config.detectors) detectors.push_back(make_detector(name, config));

  SequenceResult result;
  result.sequence = log.id;
  result.invalid = log.invalid();
  for (const std::string& name : config.detectors) result.detectors[name];

  FrontEnd front(config);
  bool merged = false;
  std::size_t evaluated = 0;
  for (const LogRecord& record : log.records) {
    const FrontEnd::Step step = front.process(record);
    if (step.merged) {
      merged = true;
      for (auto& d : detectors) d->reset();
    } else if (!step.vertex || !merged) {
      continue;
    }
    const GraphSnapshot snapshot = front.store().snapshot();
    if (snapshot.epoch_count < 2) continue;
    const VertexId newest = *front.store().last_vertex();
    for (auto& d : detectors) {
      const DetectorReport report = d->update(snapshot, newest);
      DetectorStats& stats = result.detectors[report.detector];
      stats.max_score = stats.evaluations ? std::max(stats.max_score, report.score) : report.score;
      stats.total_ms += report.compute_ms;
      if (report.alarm && !stats.first_alarm) stats.first_alarm = evaluated;
      ++stats.evaluations;
    }
    ++evaluated;
  }
  return result;
}

std::vector<SequenceResult> run_suite(const std::vector<SequenceLog>& logs,
                                      const HarnessConfig& config) {
  std::vector<SequenceResult> results(logs.size());
  std::vector<std::exception_ptr> errors(logs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < logs.size(); i = next++) {
      try {
        results[i] = run_sequence(logs[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, logs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<SequenceLog> simulate_suite(const HarnessConfig& config) {
  const std::vector<Scenario> scenarios = suite_scenarios(config.suite);
  std::vector<SequenceLog> logs;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    logs.push_back(run_scenario(s.world, s.script, config.sensor, config.seed + i, s.id));
  }
  return logs;
}

RocCurve compute_roc(const std::vector<SequenceResult>& results, const std::string& detector) {
  std::vector<std::pair<double, bool>> scored;
  for (const SequenceResult& r : results) {
    const auto it = r.detectors.find(detector);
    if (it == r.detectors.end() || it->second.evaluations == 0) continue;
    scored.emplace_back(it->second.max_score, r.invalid);
  }
  const auto positives = static_cast<std::int64_t>(
      std::count_if(scored.begin(), scored.end(), [](const auto& s) { return s.second; }));
  const auto negatives = static_cast<std::int64_t>(scored.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error("ROC for '" + detector + "' needs both correct and invalid sequences");
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.detector = detector;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::int64_t tp = 0, fp = 0;
  std::int64_t area2 = 0;  // twice the trapezoid area in count units
  for (std::size_t i = 0; i < scored.size();) {
    const double threshold = scored[i].first;
    const std::int64_t tp0 = tp, fp0 = fp;
    for (; i < scored.size() && scored[i].first == threshold; ++i) {
      (scored[i].second ? tp : fp) += 1;
    }
    area2 += (fp - fp0) * (tp + tp0);
    curve.points.push_back({threshold, static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  curve.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(positives * negatives));
  return curve;
}

std::string_view to_string(LiveEvent::Kind kind) {
  switch (kind) {
    case LiveEvent::Kind::kMergeApplied:
      return "merge";
    case LiveEvent::Kind::kAlarm:
      return "alarm";
    case LiveEvent::Kind::kUnmerge:
      return "unmerge";
  }
  return "unknown";
}

std::vector<LiveEvent> live_mode(const SequenceLog& log, const HarnessConfig& config) {
  FrontEnd front(config);
  return live_mode(log, config, front);
}

std::vector<LiveEvent> live_mode(const SequenceLog& log, const HarnessConfig& config,
                                 FrontEnd& front) {
  std::vector<std::unique_ptr<Detector>> detectors;
  for (const std::string& name : config.live_detectors) detectors.push_back(make_detector(name, config));
  std::vector<LiveEvent> events;
  bool watching = false;
  for (const LogRecord& record : log.records) {
    const FrontEnd::Step step = front.process(record);
    const std::size_t scan = front.scans() - 1;
    if (step.merged) {
      events.push_back({LiveEvent::Kind::kMergeApplied, scan, *front.store().last_vertex(), "", 0.0});
      for (auto& d : detectors) d->reset();
      watching = true;
    } else if (!step.vertex || !watching) {
      continue;
    }
    const GraphSnapshot snapshot = front.store().snapshot();
    if (snapshot.epoch_count < 2) continue;
    const VertexId newest = *front.store().last_vertex();
    for (auto& d : detectors) {
      const DetectorReport report = d->update(snapshot, newest);
      if (!report.alarm) continue;
      events.push_back({LiveEvent::Kind::kAlarm, scan, newest, report.detector, report.score});
      unmerge(front.mutable_store(), config.merge);
      events.push_back({LiveEvent::Kind::kUnmerge, scan, newest, "", 0.0});
      for (auto& other : detectors) other->reset();
      watching = false;
      break;
    }
  }
  return events;
}

std::string format_live_events(const std::vector<LiveEvent>& events) {
  std::ostringstream out;
  out << "event,scan,vertex,detector,score\n";
  for (const LiveEvent& e : events) {
    out << to_string(e.kind) << ',' << e.scan << ',' << e.vertex << ',' << e.detector << ',';
    if (e.kind == LiveEvent::Kind::kAlarm) out << format_double(e.score);
    out << '\n';
  }
  return out.str();
}

void write_results_csv(const std::filesystem::path& path, const std::vector<SequenceResult>& results) {
  auto out = open_out(path);
  out << "sequence,label,detector,max_score,mean_ms,evaluations,first_alarm\n";
  for (const SequenceResult& r : results) {
    for (const auto& [name, s] : r.detectors) {
      out << r.sequence << ',' << (r.invalid ? "invalid" : "correct") << ',' << name << ','
          << format_double(s.max_score) << ',' << format_double(s.mean_ms()) << ',' << s.evaluations << ',';
      if (s.first_alarm) out << *s.first_alarm;
      out << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<SequenceResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "sequence,label,detector,max_score,mean_ms,evaluations,first_alarm") {
    throw Error(path.string() + ": unexpected header");
  }
  std::vector<SequenceResult> results;
  std::map<std::string, std::size_t> index;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() == 6 && line.back() == ',') cells.emplace_back();
    if (cells.size() != 7 || (cells[1] != "correct" && cells[1] != "invalid")) {
      throw Error(path.string() + ": malformed line " + std::to_string(number));
    }
    auto [it, added] = index.emplace(cells[0], results.size());
    if (added) results.push_back({cells[0], cells[1] == "invalid", {}});
    DetectorStats s;
    try {
      s.max_score = std::stod(cells[3]);
      s.evaluations = std::stoul(cells[5]);
      s.total_ms = std::stod(cells[4]) * static_cast<double>(s.evaluations);
      if (!cells[6].empty()) s.first_alarm = std::stoul(cells[6]);
    } catch (const std::exception&) {
      throw Error(path.string() + ": malformed number on line " + std::to_string(number));
    }
    results[it->second].detectors[cells[2]] = s;
  }
  return results;
}

void emit_reports(const std::vector<SequenceResult>& results, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
  write_results_csv(out_dir / "results.csv", results);

  std::vector<std::string> names;
  for (const SequenceResult& r : results) {
    for (const auto& entry : r.detectors) {
      if (std::find(names.begin(), names.end(), entry.first) == names.end()) names.push_back(entry.first);
    }
  }
  std::vector<RocCurve> curves;
  auto roc = open_out(out_dir / "roc.csv");
  auto summary = open_out(out_dir / "summary.csv");
  roc << "detector,threshold,fpr,tpr\n";
  summary << "detector,auc,mean_ms,sequences\n";
  for (const std::string& name : names) {
    double total_ms = 0.0;
    std::size_t evaluations = 0, sequences = 0;
    for (const SequenceResult& r : results) {
      const auto it = r.detectors.find(name);
      if (it == r.detectors.end() || it->second.evaluations == 0) continue;
      total_ms += it->second.total_ms;
      evaluations += it->second.evaluations;
      ++sequences;
    }
    std::string auc;
    try {
      curves.push_back(compute_roc(results, name));
      auc = format_double(curves.back().auc);
      for (const RocPoint& p : curves.back().points) {
        roc << name << ',' << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
      }
    } catch (const Error&) {
      // Single-class input: no curve.
    }
    summary << name << ',' << auc << ','
            << format_double(evaluations ? total_ms / static_cast<double>(evaluations) : 0.0) << ','
            << sequences << '\n';
  }
  if (!roc || !summary) throw Error("failed writing reports in " + out_dir.string());

  auto svg = open_out(out_dir / "roc.svg");
  const double size = 400.0, margin = 50.0;
  auto px = [&](double v) { return margin + v * size; };
  auto py = [&](double v) { return margin + (1.0 - v) * size; };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin + 140 << "\" height=\""
      << size + 2 * margin << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
      << "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4 4\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    svg << "<text x=\"" << px(v) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << v << "</text>\n";
    svg << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  svg << "<text x=\"" << px(0.5) << "\" y=\"" << py(0) + 38 << "\" text-anchor=\"middle\">false positive rate</text>\n";
  svg << "<text transform=\"translate(" << px(0) - 38 << ' ' << py(0.5)
      << ") rotate(-90)\" text-anchor=\"middle\">true positive rate</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = colors[c % std::size(colors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const RocPoint& p : curves[c].points) svg << px(p.fpr) << ',' << py(p.tpr) << ' ';
    svg << "\"/>\n";
    const double ly = py(1) + 16 + 18 * static_cast<double>(c);
    svg << "<line x1=\"" << px(1) + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << px(1) + 32 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << px(1) + 38 << "\" y=\"" << ly << "\">" << curves[c].detector << " ("
        << std::setprecision(3) << curves[c].auc << std::setprecision(2) << ")</text>\n";
  }
  svg << "</svg>\n";
  if (!svg) throw Error("failed writing " + (out_dir / "roc.svg").string());
}

}  // namespace mergeguard
