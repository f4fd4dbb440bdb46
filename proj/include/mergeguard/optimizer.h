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

#ifndef MERGEGUARD_OPTIMIZER_H_
#define MERGEGUARD_OPTIMIZER_H_

#include <set>

#include <Eigen/Core>

#include "mergeguard/slam_graph.h"

namespace mergeguard {

struct OptimizerOptions {
  int max_iterations = 50;
  // Stop once an accepted step lowers chi2 by less than this fraction.
  double tolerance = 1e-10;
  double initial_damping = 1e-6;
};

struct OptimizationResult {
  int iterations = 0;
  double initial_chi2 = 0.0;
  double final_chi2 = 0.0;
  bool converged = false;
};

// Residual of one edge: measurement^-1 * (from^-1 * to), angle wrapped.
Eigen::Vector3d edge_residual(const Pose2& from, const Pose2& to,
                              const Pose2& measurement);

// Sum over edges of r^T * information * r.
double compute_chi2(const SlamGraph& graph);

// Damped Gauss-Newton over all non-fixed vertex poses, solved with a sparse
// Cholesky factorization. Fixed vertices are never written. Throws Error if
// the graph is disconnected, `fixed` is empty, or a fixed id is unknown.
OptimizationResult optimize(SlamGraph& graph, const std::set<VertexId>& fixed,
                            const OptimizerOptions& options = {});

}  // namespace mergeguard

#endif  // MERGEGUARD_OPTIMIZER_H_
