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

#include "mergeguard/change_detector.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "mergeguard/error.h"

namespace mergeguard {
namespace {

constexpr double kPi = std::numbers::pi;

// Search slack for the bearing window; the exact predicate filters after.
constexpr double kWindowSlack = 1e-9;

}  // namespace

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::kNoInfo: return "no_info";
    case ClassLabel::kChange: return "change";
    case ClassLabel::kAgree: return "agree";
  }
  return "?";
}

void ChangeDetectorConfig::validate() const {
  if (!(t_r > 0.0) || !(t_alpha > 0.0) || n_recent == 0 ||
      !(tau_overlap > 0.0) || !(visibility_cell_size > 0.0) ||
      !(cache_invalidate_trans > 0.0) || !(cache_invalidate_rot > 0.0)) {
    throw Error("change detector thresholds must be positive");
  }
  if (!(t_unmerge > 0.0 && t_unmerge < 1.0)) {
    throw Error("change detector t_unmerge must lie in (0, 1)");
  }
}

std::size_t ChangeDetectorConfig::min_shared_cells() const {
  const double cells = tau_overlap / (visibility_cell_size * visibility_cell_size);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(cells - 1e-9)));
}

namespace {

// Labels a point given in the source sensor frame. `first_at_or_after(lo)`
// returns a sorted-bearing position no later than the first bearing >= lo.
template <typename Lookup>
ClassLabel classify_local(const Eigen::Vector2d& local, const Scan& source,
                          const ChangeDetectorConfig& cfg, Lookup&& first_at_or_after) {
  const double r_t = local.norm();
  if (r_t > source.range_max()) return ClassLabel::kNoInfo;
  const double b = std::atan2(local.y(), local.x());

  const auto points = source.points();
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t idx) {
    const PolarPoint& p = points[idx];
    double d = p.bearing - b;
    if (!(std::abs(d) < kPi)) d = normalize_angle(d);  // identity below pi
    if (std::abs(d) <= cfg.t_alpha) {
      r_min = std::min(r_min, p.range);
      r_max = std::max(r_max, p.range);
    }
  };
  const auto sorted = source.sorted_bearings();
  const auto order = source.sorted_order();
  auto scan_window = [&](double lo, double hi) {
    for (std::size_t i = first_at_or_after(lo); i < sorted.size() && sorted[i] <= hi; ++i) {
      consider(order[i]);
    }
  };
  const double half = cfg.t_alpha + kWindowSlack;
  if (half >= kPi) {
    for (std::size_t i = 0; i < points.size(); ++i) consider(i);
  } else {
    const double lo = b - half;
    const double hi = b + half;
    scan_window(std::max(lo, -kPi), std::min(hi, kPi));
    if (lo < -kPi) scan_window(lo + 2.0 * kPi, kPi);
    if (hi > kPi) scan_window(-kPi, hi - 2.0 * kPi);
  }

  if (r_max < r_min) return ClassLabel::kNoInfo;  // nothing near this bearing
  if (r_t < r_min - cfg.t_r) return ClassLabel::kChange;
  if (r_t > r_max + cfg.t_r) return ClassLabel::kNoInfo;
  return r_max - r_min <= 2.0 * cfg.t_r ? ClassLabel::kAgree : ClassLabel::kNoInfo;
}

constexpr std::size_t kBearingBins = 1024;
constexpr double kBinWidth = 2.0 * kPi / kBearingBins;

// bins[k]: first sorted position with bearing >= -pi + k * kBinWidth.
std::vector<std::uint32_t> bearing_bins(const Scan& scan) {
  const auto sorted = scan.sorted_bearings();
  std::vector<std::uint32_t> bins(kBearingBins + 1);
  for (std::size_t k = 0; k <= kBearingBins; ++k) {
    const double start = -kPi + static_cast<double>(k) * kBinWidth;
    bins[k] = static_cast<std::uint32_t>(
        std::lower_bound(sorted.begin(), sorted.end(), start) - sorted.begin());
  }
  return bins;
}

std::vector<ClassLabel> classify_points(std::span<const Eigen::Vector2d> globals,
                                        const Scan& source,
                                        std::span<const std::uint32_t> bins,
                                        const ChangeDetectorConfig& cfg) {
  const Pose2 to_source = inverse(source.pose());
  auto lookup = [&](double lo) -> std::size_t {
    // Bin starts are rounded, so step one bin back to stay at or before lo.
    const auto k = static_cast<std::int64_t>(std::floor((lo + kPi) / kBinWidth)) - 1;
    return bins[static_cast<std::size_t>(
        std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(kBearingBins)))];
  };
  // Same arithmetic as Pose2::operator* without per-point trigonometry.
  const double c = std::cos(to_source.theta);
  const double s = std::sin(to_source.theta);
  std::vector<ClassLabel> labels(globals.size());
  for (std::size_t i = 0; i < globals.size(); ++i) {
    const Eigen::Vector2d& g = globals[i];
    const Eigen::Vector2d local(to_source.x + c * g.x() - s * g.y(),
                                to_source.y + s * g.x() + c * g.y());
    labels[i] = classify_local(local, source, cfg, lookup);
  }
  return labels;
}

std::vector<Eigen::Vector2d> global_points_of(const Scan& scan) {
  std::vector<Eigen::Vector2d> out(scan.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scan.global_point(i);
  return out;
}

}  // namespace

ClassLabel classify_point(const Eigen::Vector2d& global_point,
                          const Scan& source, const ChangeDetectorConfig& cfg) {
  const auto sorted = source.sorted_bearings();
  return classify_local(inverse(source.pose()) * global_point, source, cfg, [&](double lo) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), lo) - sorted.begin());
  });
}

std::vector<ClassLabel> classify_scan_pair(const Scan& target,
                                           const Scan& source,
                                           const ChangeDetectorConfig& cfg) {
  return classify_points(global_points_of(target), source, bearing_bins(source), cfg);
}

double invalidity_ratio(std::size_t change, std::size_t agree) {
  if (change + agree == 0) return 0.0;
  return static_cast<double>(change) / static_cast<double>(change + agree);
}

std::vector<CellIndex> observed_cells(const Scan& scan, double cell_size) {
  std::vector<CellIndex> cells;
  const Eigen::Vector2d origin = scan.pose().translation();
  for (const Eigen::Vector2d& end : scan.global_points()) {
    traverse_segment(origin, end, cell_size,
                     [&](const CellIndex& c) { cells.push_back(c); });
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

VisibilityGrid::VisibilityGrid(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw Error("visibility grid cell size must be positive");
}

void VisibilityGrid::clear() { cells_.clear(); }

void VisibilityGrid::build(const GraphSnapshot& snapshot) {
  clear();
  for (const VertexView* v : snapshot.other_epoch_vertices()) add(v->id, v->scan);
}

void VisibilityGrid::add(VertexId id, const Scan& scan) {
  for (const CellIndex& c : observed_cells(scan, cell_size_)) {
    std::vector<VertexId>& ids = cells_[c];
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) ids.insert(it, id);
  }
}

std::span<const VertexId> VisibilityGrid::at(const CellIndex& cell) const {
  auto it = cells_.find(cell);
  if (it == cells_.end()) return {};
  return it->second;
}

std::map<VertexId, std::size_t> VisibilityGrid::shared_cells(
    std::span<const CellIndex> cells) const {
  std::unordered_map<VertexId, std::size_t> counts;
  for (const CellIndex& c : cells) {
    auto it = cells_.find(c);
    if (it == cells_.end()) continue;
    for (VertexId id : it->second) ++counts[id];
  }
  return {counts.begin(), counts.end()};
}

std::vector<std::pair<VertexId, VertexId>> select_pairs(
    const GraphSnapshot& snapshot, const VisibilityGrid& grid,
    const ChangeDetectorConfig& cfg) {
  const std::size_t min_cells = cfg.min_shared_cells();
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (const VertexView* v : snapshot.recent_current(cfg.n_recent)) {
    const auto cells = observed_cells(v->scan, grid.cell_size());
    for (const auto& [other, count] : grid.shared_cells(cells)) {
      if (count >= min_cells) pairs.emplace_back(v->id, other);
    }
  }
  return pairs;
}

ChangeDetector::ChangeDetector(ChangeDetectorConfig config)
    : config_(config), grid_(config.visibility_cell_size) {
  config_.validate();
}

void ChangeDetector::reset() {
  grid_.clear();
  grid_poses_.clear();
  current_cells_.clear();
  prepared_.clear();
  cache_.clear();
  pairs_.clear();
  fused_.clear();
  counts_ = {};
}

bool ChangeDetector::moved(const Pose2& before, const Pose2& now) const {
  return translation_distance(before, now) > config_.cache_invalidate_trans ||
         rotation_distance(before, now) > config_.cache_invalidate_rot;
}

std::size_t ChangeDetector::invalidate_cache(const GraphSnapshot& snapshot) {
  std::size_t dropped = 0;
  for (auto it = cache_.begin(); it != cache_.end();) {
    const VertexView* target = snapshot.find(it->first.first);
    const VertexView* source = snapshot.find(it->first.second);
    if (target == nullptr || source == nullptr ||
        moved(it->second.target_pose, target->scan.pose()) ||
        moved(it->second.source_pose, source->scan.pose())) {
      it = cache_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

void ChangeDetector::refresh_grid(const GraphSnapshot& snapshot) {
  const auto others = snapshot.other_epoch_vertices();
  bool stale = others.size() != grid_poses_.size() || grid_poses_.empty();
  for (std::size_t k = 0; !stale && k < others.size(); ++k) {
    auto it = grid_poses_.find(others[k]->id);
    stale = it == grid_poses_.end() || moved(it->second, others[k]->scan.pose());
  }
  if (!stale) return;
  grid_.build(snapshot);
  grid_poses_.clear();
  for (const VertexView* v : others) grid_poses_.emplace(v->id, v->scan.pose());
  ++grid_builds_;
}

const std::map<VertexId, std::size_t>& ChangeDetector::shared_of(const VertexView& v) {
  auto it = current_cells_.find(v.id);
  if (it == current_cells_.end() || moved(it->second.pose, v.scan.pose())) {
    CachedCells fresh{v.scan.pose(), observed_cells(v.scan, grid_.cell_size()), 0, {}};
    it = current_cells_.insert_or_assign(v.id, std::move(fresh)).first;
  }
  CachedCells& cached = it->second;
  if (cached.grid_build != grid_builds_) {
    cached.shared = grid_.shared_cells(cached.cells);
    cached.grid_build = grid_builds_;
  }
  return cached.shared;
}

void ChangeDetector::classify(const VertexView& target, const VertexView& source) {
  const auto key = std::make_pair(target.id, source.id);
  if (cache_.count(key) != 0) return;
  cache_.emplace(key, Entry{target.scan.pose(), source.scan.pose(),
                            classify_points(prepared(target).globals, source.scan,
                                            prepared(source).bins, config_)});
  ++classifications_;
}

const ChangeDetector::Prepared& ChangeDetector::prepared(const VertexView& v) {
  auto it = prepared_.find(v.id);
  const Pose2& pose = v.scan.pose();
  if (it != prepared_.end() && it->second.data == v.scan.data_id() && it->second.pose.x == pose.x &&
      it->second.pose.y == pose.y && it->second.pose.theta == pose.theta) {
    return it->second;
  }
  Prepared fresh{pose, v.scan.data_id(), global_points_of(v.scan), bearing_bins(v.scan)};
  return prepared_.insert_or_assign(v.id, std::move(fresh)).first->second;
}

double ChangeDetector::evaluate(const GraphSnapshot& snapshot, VertexId) {
  refresh_grid(snapshot);
  invalidate_cache(snapshot);

  const std::size_t min_cells = config_.min_shared_cells();
  const auto recent = snapshot.recent_current(config_.n_recent);
  std::set<VertexId> considered;
  pairs_.clear();
  for (const VertexView* v : recent) {
    considered.insert(v->id);
    for (const auto& [other, count] : shared_of(*v)) {
      if (count >= min_cells) pairs_.emplace_back(v->id, other);
    }
  }
  for (auto it = current_cells_.begin(); it != current_cells_.end();) {
    it = considered.count(it->first) ? std::next(it) : current_cells_.erase(it);
  }

  for (const auto& [current, other] : pairs_) {
    const VertexView* c = snapshot.find(current);
    const VertexView* o = snapshot.find(other);
    classify(*c, *o);
    classify(*o, *c);
    considered.insert(other);
  }

  fused_.clear();
  counts_ = {};
  for (VertexId id : considered) {
    const VertexView* v = snapshot.find(id);
    std::vector<ClassLabel> labels(v->scan.size(), ClassLabel::kNoInfo);
    for (auto it = cache_.lower_bound({id, std::numeric_limits<VertexId>::min()});
         it != cache_.end() && it->first.first == id; ++it) {
      for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = fuse(labels[i], it->second.labels[i]);
      }
    }
    for (ClassLabel l : labels) {
      switch (l) {
        case ClassLabel::kAgree: ++counts_.agree; break;
        case ClassLabel::kChange: ++counts_.change; break;
        case ClassLabel::kNoInfo: ++counts_.no_info; break;
      }
    }
    fused_.emplace(id, std::move(labels));
  }
  return invalidity_ratio(counts_.change, counts_.agree);
}

void ChangeDetector::write_labels_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "vertex,point,label\n";
  for (const auto& [id, labels] : fused_) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out << id << ',' << i << ',' << to_string(labels[i]) << '\n';
    }
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace mergeguard
