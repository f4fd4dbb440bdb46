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

#include "mergeguard/entropy_detector.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mergeguard/error.h"

namespace mergeguard {
namespace {

// ln(2*pi*e): 0.5*ln(det(2*pi*e*S)) = ln(2*pi*e) + 0.5*ln(det S) in 2D.
const double kLogTwoPiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

// Covariances with det below this fraction of trace^2 count as singular.
constexpr double kSingular = 1e-12;

std::optional<double> entropy_of(double cxx, double cxy, double cyy) {
  const double det = cxx * cyy - cxy * cxy;
  const double trace = cxx + cyy;
  if (!(det > kSingular * trace * trace)) return std::nullopt;
  return kLogTwoPiE + 0.5 * std::log(det);
}

}  // namespace

std::string_view to_string(DeltaFormula formula) {
  return formula == DeltaFormula::kLiteral ? "literal" : "mean_of_parts";
}

DeltaFormula delta_formula_from_string(std::string_view name) {
  if (name == "mean_of_parts") return DeltaFormula::kMeanOfParts;
  if (name == "literal") return DeltaFormula::kLiteral;
  throw Error("unknown entropy delta formula '" + std::string(name) + "'");
}

void EntropyConfig::validate() const {
  if (!(radius > 0.0)) throw Error("entropy radius must be positive");
  if (min_neighbors < 3) throw Error("entropy min_neighbors must be at least 3");
  if (!std::isfinite(t_unmerge)) throw Error("entropy t_unmerge must be finite");
}

std::optional<double> point_entropy(std::span<const Eigen::Vector2d> neighbors,
                                    std::size_t min_neighbors) {
  if (neighbors.size() < min_neighbors || neighbors.empty()) return std::nullopt;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const Eigen::Vector2d& p : neighbors) mean += p;
  mean /= static_cast<double>(neighbors.size());
  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (const Eigen::Vector2d& p : neighbors) {
    const Eigen::Vector2d d = p - mean;
    cxx += d.x() * d.x();
    cxy += d.x() * d.y();
    cyy += d.y() * d.y();
  }
  const double n = static_cast<double>(neighbors.size());
  return entropy_of(cxx / n, cxy / n, cyy / n);
}

double map_entropy(std::span<const Eigen::Vector2d> points, double radius,
                   std::size_t min_neighbors) {
  IncrementalEntropy map(radius, min_neighbors);
  map.add(points);
  return map.entropy();
}

double delta_entropy(double h_all, double h_cur, double h_other,
                     DeltaFormula formula) {
  if (formula == DeltaFormula::kLiteral) return h_all - 0.5 * (h_cur - h_other);
  return h_all - 0.5 * (h_cur + h_other);
}

PointIndex::PointIndex(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw Error("point index radius must be positive");
}

std::size_t PointIndex::add(const Eigen::Vector2d& p) {
  const std::size_t i = points_.size();
  points_.push_back(p);
  bins_[cell_of(p, radius_)].push_back(static_cast<std::uint32_t>(i));
  return i;
}

std::vector<std::size_t> PointIndex::radius_query(const Eigen::Vector2d& q) const {
  std::vector<std::size_t> out;
  for_each_within(q, [&](std::size_t k) { out.push_back(k); });
  std::sort(out.begin(), out.end());
  return out;
}

void IncrementalEntropy::Sums::add(const Eigen::Vector2d& d) {
  ++n;
  sx += d.x();
  sy += d.y();
  sxx += d.x() * d.x();
  sxy += d.x() * d.y();
  syy += d.y() * d.y();
}

IncrementalEntropy::IncrementalEntropy(double radius, std::size_t min_neighbors)
    : min_neighbors_(min_neighbors), index_(radius) {}

void IncrementalEntropy::add(const Eigen::Vector2d& p) {
  Sums own;
  own.add(Eigen::Vector2d::Zero());
  index_.for_each_within(p, [&](std::size_t k) {
    const Eigen::Vector2d d = p - index_.point(k);
    sums_[k].add(d);
    own.add(-d);
  });
  index_.add(p);
  sums_.push_back(own);
}

void IncrementalEntropy::add(std::span<const Eigen::Vector2d> points) {
  for (const Eigen::Vector2d& p : points) add(p);
}

std::optional<double> IncrementalEntropy::point(std::size_t i) const {
  const Sums& s = sums_[i];
  if (s.n < min_neighbors_) return std::nullopt;
  const double n = static_cast<double>(s.n);
  const double mx = s.sx / n;
  const double my = s.sy / n;
  return entropy_of(s.sxx / n - mx * mx, s.sxy / n - mx * my, s.syy / n - my * my);
}

double IncrementalEntropy::entropy() const {
  if (sums_.empty()) throw Error("entropy of an empty map");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    if (const auto h = point(i)) {
      sum += *h;
      ++used;
    }
  }
  if (used == 0) throw Error("entropy undefined: every point lacks a usable neighbourhood");
  return sum / static_cast<double>(used);
}

EntropyDetector::EntropyDetector(EntropyConfig config) : config_(config) {
  config_.validate();
}

void EntropyDetector::reset() {
  known_.clear();
  all_.reset();
  current_.reset();
  other_.reset();
  h_all_ = h_cur_ = h_other_ = 0.0;
}

void EntropyDetector::rebuild() {
  known_.clear();
  all_.emplace(config_.radius, config_.min_neighbors);
  current_.emplace(config_.radius, config_.min_neighbors);
  other_.emplace(config_.radius, config_.min_neighbors);
  ++rebuilds_;
}

double EntropyDetector::evaluate(const GraphSnapshot& snapshot, VertexId) {
  bool stale = !all_ || snapshot.current_epoch != current_epoch_;
  for (auto it = known_.begin(); !stale && it != known_.end(); ++it) {
    const VertexView* v = snapshot.find(it->first);
    stale = v == nullptr || v->epoch != it->second.epoch ||
            v->scan.pose().x != it->second.pose.x ||
            v->scan.pose().y != it->second.pose.y ||
            v->scan.pose().theta != it->second.pose.theta;
  }
  if (stale) {
    rebuild();
    current_epoch_ = snapshot.current_epoch;
  }
  for (const VertexView& v : snapshot.vertices) {
    if (known_.count(v.id) != 0) continue;
    const std::vector<Eigen::Vector2d> points = v.scan.global_points();
    all_->add(points);
    (v.epoch == snapshot.current_epoch ? *current_ : *other_).add(points);
    known_.emplace(v.id, Known{v.epoch, v.scan.pose()});
  }
  if (current_->size() == 0 || other_->size() == 0) {
    throw Error("entropy detector needs points in both the current and other epochs");
  }
  h_all_ = all_->entropy();
  h_cur_ = current_->entropy();
  h_other_ = other_->entropy();
  return delta_entropy(h_all_, h_cur_, h_other_, config_.delta_formula);
}

}  // namespace mergeguard
