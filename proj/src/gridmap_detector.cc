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

#include "mergeguard/gridmap_detector.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <string>

#include "mergeguard/error.h"

namespace mergeguard {

void BoundingBox::extend(const Eigen::Vector2d& p) {
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

BoundingBox BoundingBox::empty() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return {{kInf, kInf}, {-kInf, -kInf}};
}

BoundingBox scan_bounds(std::span<const Scan* const> scans) {
  BoundingBox box = BoundingBox::empty();
  for (const Scan* scan : scans) {
    box.extend(scan->pose().translation());
    for (const Eigen::Vector2d& p : scan->global_points()) box.extend(p);
  }
  return box;
}

TriStateGrid::TriStateGrid(double cell_size, CellIndex min_cell, int width,
                           int height)
    : cell_size_(cell_size),
      min_cell_(min_cell),
      width_(width),
      height_(height),
      cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
             CellState::kUnknown) {
  if (!(cell_size > 0.0)) throw Error("grid cell size must be positive");
  if (width < 0 || height < 0) throw Error("grid extents must be non-negative");
}

TriStateGrid TriStateGrid::covering(const BoundingBox& box, double cell_size) {
  if (!box.valid()) throw Error("grid bounding box is empty");
  const CellIndex lo = cell_of(box.min, cell_size);
  const CellIndex hi = cell_of(box.max, cell_size);
  const std::int64_t w = hi.i - lo.i + 1;
  const std::int64_t h = hi.j - lo.j + 1;
  if (w * h > 200'000'000) throw Error("grid bounding box too large");
  return TriStateGrid(cell_size, lo, static_cast<int>(w), static_cast<int>(h));
}

bool TriStateGrid::contains(const CellIndex& c) const {
  return c.i >= min_cell_.i && c.j >= min_cell_.j &&
         c.i < min_cell_.i + width_ && c.j < min_cell_.j + height_;
}

CellState TriStateGrid::at(const CellIndex& c) const {
  if (!contains(c)) return CellState::kUnknown;
  return at(static_cast<int>(c.i - min_cell_.i), static_cast<int>(c.j - min_cell_.j));
}

void TriStateGrid::mark_empty(const CellIndex& c) {
  if (!contains(c)) return;
  CellState& s = cells_[index(static_cast<int>(c.i - min_cell_.i),
                              static_cast<int>(c.j - min_cell_.j))];
  if (s == CellState::kUnknown) s = CellState::kEmpty;
}

void TriStateGrid::mark_occupied(const CellIndex& c) {
  if (!contains(c)) return;
  cells_[index(static_cast<int>(c.i - min_cell_.i),
               static_cast<int>(c.j - min_cell_.j))] = CellState::kOccupied;
}

std::size_t TriStateGrid::count(CellState s) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), s));
}

bool TriStateGrid::same_geometry(const TriStateGrid& other) const {
  return cell_size_ == other.cell_size_ && min_cell_ == other.min_cell_ &&
         width_ == other.width_ && height_ == other.height_;
}

TriStateGrid TriStateGrid::window(CellIndex min_cell, int width,
                                  int height) const {
  TriStateGrid out(cell_size_, min_cell, width, height);
  const std::int64_t x0 = std::max<std::int64_t>(min_cell.i, min_cell_.i);
  const std::int64_t x1 = std::min<std::int64_t>(min_cell.i + width, min_cell_.i + width_);
  const std::int64_t y0 = std::max<std::int64_t>(min_cell.j, min_cell_.j);
  const std::int64_t y1 = std::min<std::int64_t>(min_cell.j + height, min_cell_.j + height_);
  if (x1 <= x0) return out;
  for (std::int64_t y = y0; y < y1; ++y) {
    const auto src = cells_.begin() +
                     static_cast<std::ptrdiff_t>(index(static_cast<int>(x0 - min_cell_.i),
                                                       static_cast<int>(y - min_cell_.j)));
    const auto dst = out.cells_.begin() +
                     static_cast<std::ptrdiff_t>(out.index(static_cast<int>(x0 - min_cell.i),
                                                           static_cast<int>(y - min_cell.j)));
    std::copy(src, src + (x1 - x0), dst);
  }
  return out;
}

void TriStateGrid::write_pgm(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << width_ << ' ' << height_ << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(width_));
  for (int y = height_ - 1; y >= 0; --y) {
    for (int x = 0; x < width_; ++x) {
      switch (at(x, y)) {
        case CellState::kUnknown: row[x] = 128; break;
        case CellState::kEmpty: row[x] = 255; break;
        case CellState::kOccupied: row[x] = 0; break;
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void insert_scan(TriStateGrid& grid, const Scan& scan) {
  if (grid.width() == 0 || grid.height() == 0) return;
  const double cs = grid.cell_size();
  // Clip a little outside the grid so clipped ends never land inside it.
  const Eigen::Vector2d box_min = grid.origin() - Eigen::Vector2d::Constant(2 * cs);
  const Eigen::Vector2d box_max =
      grid.origin() + Eigen::Vector2d(grid.width() + 2, grid.height() + 2) * cs;
  const Eigen::Vector2d sensor = scan.pose().translation();
  for (const Eigen::Vector2d& endpoint : scan.global_points()) {
    double t0 = 0.0, t1 = 1.0;
    if (!clip_segment(sensor, endpoint, box_min, box_max, t0, t1)) continue;
    const Eigen::Vector2d d = endpoint - sensor;
    const Eigen::Vector2d a = t0 == 0.0 ? sensor : Eigen::Vector2d(sensor + t0 * d);
    const Eigen::Vector2d b = t1 == 1.0 ? endpoint : Eigen::Vector2d(sensor + t1 * d);
    const CellIndex sensor_cell = cell_of(sensor, cs);
    const CellIndex end_cell = cell_of(endpoint, cs);
    const bool has_end = t1 == 1.0;
    traverse_segment(a, b, cs, [&](const CellIndex& c) {
      if (has_end && c == end_cell) return;
      if (c == sensor_cell) return;
      grid.mark_empty(c);
    });
    if (has_end) grid.mark_occupied(end_cell);
  }
}

TriStateGrid build_grid(std::span<const Scan* const> scans,
                        const BoundingBox& box, double cell_size) {
  TriStateGrid grid = TriStateGrid::covering(box, cell_size);
  for (const Scan* scan : scans) insert_scan(grid, *scan);
  return grid;
}

TriStateGrid dilate_occupied(const TriStateGrid& grid, int half_width) {
  TriStateGrid out = grid;
  if (half_width <= 0) return out;
  const int w = grid.width();
  const int h = grid.height();
  // Separable box dilation using running counts of occupied cells.
  std::vector<std::uint8_t> horizontal(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> prefix;
  for (int y = 0; y < h; ++y) {
    prefix.assign(static_cast<std::size_t>(w) + 1, 0);
    for (int x = 0; x < w; ++x) {
      prefix[x + 1] = prefix[x] + (grid.at(x, y) == CellState::kOccupied ? 1 : 0);
    }
    for (int x = 0; x < w; ++x) {
      const int lo = std::max(0, x - half_width);
      const int hi = std::min(w, x + half_width + 1);
      horizontal[static_cast<std::size_t>(y) * w + x] = prefix[hi] - prefix[lo] > 0;
    }
  }
  for (int x = 0; x < w; ++x) {
    prefix.assign(static_cast<std::size_t>(h) + 1, 0);
    for (int y = 0; y < h; ++y) {
      prefix[y + 1] = prefix[y] + horizontal[static_cast<std::size_t>(y) * w + x];
    }
    for (int y = 0; y < h; ++y) {
      const int lo = std::max(0, y - half_width);
      const int hi = std::min(h, y + half_width + 1);
      if (prefix[hi] - prefix[lo] > 0) out.set(x, y, CellState::kOccupied);
    }
  }
  return out;
}

GridComparison compare(const TriStateGrid& a, const TriStateGrid& b,
                       std::size_t min_overlap) {
  if (!a.same_geometry(b)) {
    throw Error("gridmaps compared with mismatched geometry");
  }
  GridComparison result;
  const auto ca = a.cells();
  const auto cb = b.cells();
  for (std::size_t k = 0; k < ca.size(); ++k) {
    if (ca[k] == CellState::kUnknown || cb[k] == CellState::kUnknown) continue;
    ++result.overlap;
    if (ca[k] != cb[k]) ++result.contradictions;
  }
  if (result.overlap >= min_overlap && result.overlap > 0) {
    result.ratio = static_cast<double>(result.contradictions) /
                   static_cast<double>(result.overlap);
  }
  return result;
}

GridmapDetector::GridmapDetector(GridmapDetectorConfig config)
    : config_(config) {
  if (!(config_.cell_size > 0.0) || config_.n_recent == 0 ||
      config_.dilation_half_width < 0 || !(config_.t_unmerge > 0.0)) {
    throw Error("invalid gridmap detector configuration");
  }
}

void GridmapDetector::reset() {
  other_signature_.clear();
  other_grid_.reset();
  last_ = {};
}

double GridmapDetector::evaluate(const GraphSnapshot& snapshot, VertexId) {
  const std::vector<const VertexView*> recent =
      snapshot.recent_current(config_.n_recent);
  const std::vector<const VertexView*> others = snapshot.other_epoch_vertices();
  if (recent.empty() || others.empty()) {
    last_ = {};
    return 0.0;
  }

  std::vector<const Scan*> recent_scans;
  for (const VertexView* v : recent) recent_scans.push_back(&v->scan);
  TriStateGrid current =
      build_grid(recent_scans, scan_bounds(recent_scans), config_.cell_size);

  // The other-epoch grid only depends on other-epoch poses, so it is built
  // once over its full extent and windowed per call.
  Signature signature;
  signature.reserve(others.size());
  for (const VertexView* v : others) signature.emplace_back(v->id, v->scan.pose());
  const bool same = other_grid_ && signature.size() == other_signature_.size() &&
                    std::equal(signature.begin(), signature.end(),
                               other_signature_.begin(), [](const auto& l, const auto& r) {
                                 return l.first == r.first && l.second.x == r.second.x &&
                                        l.second.y == r.second.y &&
                                        l.second.theta == r.second.theta;
                               });
  if (!same) {
    std::vector<const Scan*> other_scans;
    for (const VertexView* v : others) other_scans.push_back(&v->scan);
    other_grid_ = build_grid(other_scans, scan_bounds(other_scans), config_.cell_size);
    other_signature_ = std::move(signature);
    ++other_builds_;
  }
  TriStateGrid other =
      other_grid_->window(current.min_cell(), current.width(), current.height());

  last_current_ = dilate_occupied(current, config_.dilation_half_width);
  last_other_ = dilate_occupied(other, config_.dilation_half_width);
  last_ = compare(last_current_, last_other_, config_.tau_overlap_cells);
  return last_.ratio;
}

}  // namespace mergeguard
