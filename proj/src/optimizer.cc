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

#include "mergeguard/optimizer.h"

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "mergeguard/error.h"

namespace mergeguard {
namespace {

struct EdgeTerm {
  int from;  // index into poses
  int to;
  const Edge* edge;
};

double chi2_of(const std::vector<Pose2>& poses,
               const std::vector<EdgeTerm>& terms) {
  double chi2 = 0.0;
  for (const EdgeTerm& t : terms) {
    const Eigen::Vector3d r =
        edge_residual(poses[t.from], poses[t.to], t.edge->measurement);
    chi2 += r.dot(t.edge->information * r);
  }
  return chi2;
}

}  // namespace

Eigen::Vector3d edge_residual(const Pose2& from, const Pose2& to,
                              const Pose2& measurement) {
  const Pose2 predicted = between(from, to);
  const double cz = std::cos(measurement.theta);
  const double sz = std::sin(measurement.theta);
  const double dx = predicted.x - measurement.x;
  const double dy = predicted.y - measurement.y;
  return {cz * dx + sz * dy, -sz * dx + cz * dy,
          normalize_angle(to.theta - from.theta - measurement.theta)};
}

double compute_chi2(const SlamGraph& graph) {
  double chi2 = 0.0;
  for (const Edge& e : graph.edges()) {
    const Eigen::Vector3d r = edge_residual(
        graph.vertex(e.from).pose(), graph.vertex(e.to).pose(), e.measurement);
    chi2 += r.dot(e.information * r);
  }
  return chi2;
}

OptimizationResult optimize(SlamGraph& graph, const std::set<VertexId>& fixed,
                            const OptimizerOptions& options) {
  if (fixed.empty()) {
    throw Error("optimize needs at least one fixed vertex");
  }
  for (VertexId id : fixed) {
    if (!graph.contains(id)) {
      throw Error("fixed vertex " + std::to_string(id) + " not in graph");
    }
  }
  if (!graph.is_connected()) {
    throw Error("optimize requires a connected graph");
  }

  // Pose slots: every vertex. Free vertices also get a block of 3 unknowns.
  std::vector<VertexId> ids;
  std::vector<Pose2> poses;
  std::vector<int> block;  // -1 for fixed
  std::unordered_map<VertexId, int> slot;
  int free_count = 0;
  for (const auto& [id, v] : graph.vertices()) {
    slot[id] = static_cast<int>(ids.size());
    ids.push_back(id);
    poses.push_back(v.pose());
    block.push_back(fixed.count(id) ? -1 : free_count++);
  }
  std::vector<EdgeTerm> terms;
  terms.reserve(graph.edges().size());
  for (const Edge& e : graph.edges()) {
    terms.push_back({slot.at(e.from), slot.at(e.to), &e});
  }

  OptimizationResult result;
  double chi2 = chi2_of(poses, terms);
  result.initial_chi2 = chi2;
  result.final_chi2 = chi2;
  if (free_count == 0 || terms.empty() || chi2 == 0.0) {
    result.converged = true;
    return result;
  }

  const int n = 3 * free_count;
  double damping = options.initial_damping;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool pattern_analyzed = false;

  while (result.iterations < options.max_iterations) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(terms.size() * 36 + static_cast<std::size_t>(n));
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(n);

    for (const EdgeTerm& t : terms) {
      const Pose2& pi = poses[t.from];
      const Pose2& pj = poses[t.to];
      const Pose2& z = t.edge->measurement;
      const Eigen::Vector3d r = edge_residual(pi, pj, z);

      const double ci = std::cos(pi.theta), si = std::sin(pi.theta);
      const double cz = std::cos(z.theta), sz = std::sin(z.theta);
      Eigen::Matrix2d rz_t;
      rz_t << cz, sz, -sz, cz;
      Eigen::Matrix2d ri_t;
      ri_t << ci, si, -si, ci;
      Eigen::Matrix2d dri_t;
      dri_t << -si, ci, -ci, -si;
      const Eigen::Vector2d dt(pj.x - pi.x, pj.y - pi.y);

      Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
      a.topLeftCorner<2, 2>() = -rz_t * ri_t;
      a.block<2, 1>(0, 2) = rz_t * dri_t * dt;
      a(2, 2) = -1.0;
      Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
      b.topLeftCorner<2, 2>() = rz_t * ri_t;
      b(2, 2) = 1.0;

      const Eigen::Matrix3d& info = t.edge->information;
      const int bi = block[t.from];
      const int bj = block[t.to];
      const Eigen::Matrix3d* jac[2] = {&a, &b};
      const int blocks[2] = {bi, bj};
      for (int p = 0; p < 2; ++p) {
        if (blocks[p] < 0) continue;
        gradient.segment<3>(3 * blocks[p]) += jac[p]->transpose() * info * r;
        for (int q = 0; q < 2; ++q) {
          if (blocks[q] < 0) continue;
          const Eigen::Matrix3d h = jac[p]->transpose() * info * (*jac[q]);
          for (int rr = 0; rr < 3; ++rr) {
            for (int cc = 0; cc < 3; ++cc) {
              triplets.emplace_back(3 * blocks[p] + rr, 3 * blocks[q] + cc,
                                    h(rr, cc));
            }
          }
        }
      }
    }

    Eigen::SparseMatrix<double> hessian(n, n);
    hessian.setFromTriplets(triplets.begin(), triplets.end());

    bool accepted = false;
    while (!accepted && result.iterations < options.max_iterations) {
      Eigen::SparseMatrix<double> damped = hessian;
      for (int i = 0; i < n; ++i) damped.coeffRef(i, i) += damping;
      if (!pattern_analyzed) {
        solver.analyzePattern(damped);
        pattern_analyzed = true;
      }
      solver.factorize(damped);
      ++result.iterations;
      if (solver.info() != Eigen::Success) {
        damping *= 10.0;
        continue;
      }
      const Eigen::VectorXd step = solver.solve(-gradient);

      std::vector<Pose2> candidate = poses;
      for (std::size_t k = 0; k < candidate.size(); ++k) {
        if (block[k] < 0) continue;
        const int o = 3 * block[k];
        candidate[k] = Pose2(candidate[k].x + step(o), candidate[k].y + step(o + 1),
                             candidate[k].theta + step(o + 2));
      }
      const double candidate_chi2 = chi2_of(candidate, terms);
      if (candidate_chi2 < chi2) {
        const double decrease = (chi2 - candidate_chi2) / chi2;
        poses = std::move(candidate);
        chi2 = candidate_chi2;
        damping = std::max(damping * 0.1, 1e-12);
        accepted = true;
        if (decrease < options.tolerance || chi2 < 1e-24) {
          result.converged = true;
        }
      } else {
        damping *= 10.0;
        if (damping > 1e10) {
          // No descent direction left: at a local minimum to working precision.
          result.converged = true;
          break;
        }
      }
    }
    if (result.converged || !accepted) break;
  }

  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (block[k] >= 0) graph.set_pose(ids[k], poses[k]);
  }
  result.final_chi2 = chi2;
  return result;
}

}  // namespace mergeguard
