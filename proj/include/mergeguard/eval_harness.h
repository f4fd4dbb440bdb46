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

#ifndef MERGEGUARD_EVAL_HARNESS_H_
#define MERGEGUARD_EVAL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mergeguard/change_detector.h"
#include "mergeguard/detector.h"
#include "mergeguard/entropy_detector.h"
#include "mergeguard/graph_store.h"
#include "mergeguard/gridmap_detector.h"
#include "mergeguard/histogram_detector.h"
#include "mergeguard/merge_manager.h"
#include "mergeguard/simulator.h"

namespace mergeguard {

struct FrontEndConfig {
  // Odometry edge information is diag(1 / sigma^2).
  Eigen::Vector3d odometry_sigma{0.0025, 0.00125, 0.00075};
  // Ground-truth loop closures inside one epoch.
  bool loop_closures = true;
  std::size_t loop_min_gap = 15;       // scans between the two vertices
  double loop_max_distance = 0.75;     // meters, ground truth
  std::size_t loop_min_interval = 5;   // scans between two closures
  double loop_information = 1e4;
};

struct HarnessConfig {
  std::vector<std::string> detectors{"change", "gridmap", "entropy", "histogram"};
  std::vector<std::string> live_detectors{"change"};
  ChangeDetectorConfig change;
  GridmapDetectorConfig gridmap;
  EntropyConfig entropy;
  HistogramConfig histogram;
  FrontEndConfig front_end;
  MergeOptions merge;
  SensorModel sensor;
  SuiteOptions suite;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: one per hardware thread

  // Throws Error on unknown detector names or out-of-range values.
  void validate() const;
};

// JSON documents holding any subset of the fields; missing keys keep their
// defaults, unknown keys are rejected.
HarnessConfig parse_config(const std::string& text);
HarnessConfig load_config(const std::filesystem::path& path);
std::string dump_config(const HarnessConfig& config);

const std::vector<std::string>& known_detectors();
std::unique_ptr<Detector> make_detector(const std::string& name,
                                        const HarnessConfig& config);

// Builds the pose graphs from a scan log: one vertex per scan, ground-truth
// loop closures inside an epoch, forced merges where the log triggers them.
class FrontEnd {
 public:
  explicit FrontEnd(const HarnessConfig& config);

  struct Step {
    std::optional<VertexId> vertex;  // set for scan records
    bool merged = false;             // set for applied merge triggers
  };
  Step process(const LogRecord& record);

  const GraphStore& store() const { return store_; }
  GraphStore& mutable_store() { return store_; }
  std::size_t scans() const { return scans_; }
  std::size_t loop_closures() const { return loop_closures_; }

 private:
  void close_loop(VertexId vertex, const Pose2& truth);

  const HarnessConfig& config_;
  GraphStore store_;
  std::map<std::size_t, VertexId> vertex_of_scan_;
  struct Truth {
    VertexId vertex;
    std::size_t scan;
    Pose2 pose;
  };
  std::vector<Truth> epoch_truth_;
  std::size_t scans_ = 0;
  std::optional<std::size_t> last_closure_;
  std::size_t loop_closures_ = 0;
};

struct DetectorStats {
  double max_score = 0.0;
  double total_ms = 0.0;
  std::size_t evaluations = 0;
  // Post-merge vertex count before the first alarm at the detector's own
  // threshold.
  std::optional<std::size_t> first_alarm;

  double mean_ms() const { return evaluations ? total_ms / static_cast<double>(evaluations) : 0.0; }
};

struct SequenceResult {
  std::string sequence;
  bool invalid = false;
  std::map<std::string, DetectorStats> detectors;
};

// Evaluation mode: every configured detector runs on every vertex from the
// merge on, alarms never unmerge. Throws Error if the log has no merge.
SequenceResult run_sequence(const SequenceLog& log, const HarnessConfig& config);

// Runs sequences on worker threads; results keep the input order.
std::vector<SequenceResult> run_suite(const std::vector<SequenceLog>& logs,
                                      const HarnessConfig& config);

// Scan logs for suite_scenarios(config.suite), sequence i seeded with
// config.seed + i.
std::vector<SequenceLog> simulate_suite(const HarnessConfig& config);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::string detector;
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Positive class is an invalid merge; a sequence alarms at threshold t when
// its maximum score is >= t. Sequences without the detector are ignored.
// Throws Error unless both classes are present.
RocCurve compute_roc(const std::vector<SequenceResult>& results,
                     const std::string& detector);

struct LiveEvent {
  enum class Kind { kMergeApplied, kAlarm, kUnmerge };
  Kind kind = Kind::kMergeApplied;
  std::size_t scan = 0;
  VertexId vertex = 0;
  std::string detector;  // alarms only
  double score = 0.0;    // alarms only
};

std::string_view to_string(LiveEvent::Kind kind);

// Deployment mode: config.live_detectors run after every merge and the
// first alarm unmerges the active graph.
std::vector<LiveEvent> live_mode(const SequenceLog& log, const HarnessConfig& config);
// Same, feeding a caller-owned front end so the final graphs stay readable.
std::vector<LiveEvent> live_mode(const SequenceLog& log, const HarnessConfig& config,
                                 FrontEnd& front);
std::string format_live_events(const std::vector<LiveEvent>& events);

// Writes results.csv, roc.csv, summary.csv and roc.svg into `out_dir`,
// creating it if needed. Detectors lacking both classes get no curve.
void emit_reports(const std::vector<SequenceResult>& results,
                  const std::filesystem::path& out_dir);

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<SequenceResult>& results);
std::vector<SequenceResult> read_results_csv(const std::filesystem::path& path);

}  // namespace mergeguard

#endif  // MERGEGUARD_EVAL_HARNESS_H_
