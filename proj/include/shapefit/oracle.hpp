// Copyright 2026 The ShapeFit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHAPEFIT_ORACLE_HPP_
#define SHAPEFIT_ORACLE_HPP_

#include <vector>

#include "shapefit/model.hpp"

namespace shapefit {

// Slow reference minimizer for small instances. Every edge term is smoothed
// as sqrt(|r|^2 + eps^2) and the smoothed problem is minimized over the
// affine gauge set by damped Newton steps in an orthonormal tangent basis
// (projected gradient as the fallback direction) with Armijo backtracking,
// warm-started along a decreasing eps schedule. Dense Hessians limit this to
// a few dozen vertices. Nothing here depends on the ADMM engine.
struct OracleConfig {
  std::vector<double> eps_schedule = {1e-1, 1e-3, 1e-6, 1e-9, 1e-12};
  int max_inner_iters = 2000;
  // A stage ends once the projected gradient norm drops below this.
  double gradient_tol = 1e-13;
};

// Largest instance the oracle accepts.
inline constexpr int kOracleMaxVertices = 30;

void CheckConfig(const OracleConfig& cfg);

enum class OracleProgram {
  // Σ ‖P_{v⊥} x_k‖ over {Σ t = 0, Σ <x_k, v_k> = 1}.
  kShapeFit,
  // Σ min_{δ >= 1} ‖x_k - δ v_k‖ over {Σ t = 0}.
  kLud,
};

// Smoothed objective at `points` (x_k = t_i - t_j). When `gradient` is not
// null it receives the full (unprojected) gradient.
double SmoothedObjective(OracleProgram program, const DirectionGraph& graph,
                         const Matrix& points, double eps,
                         Matrix* gradient = nullptr);

// Unsmoothed objective (eps = 0).
double ExactObjective(OracleProgram program, const DirectionGraph& graph,
                      const Matrix& points);

struct OracleResult {
  PointCloud locations;
  double objective = 0.0;  // unsmoothed
  int iterations = 0;      // accepted steps over all stages
};

// Throws kInvalidArgument for n > kOracleMaxVertices or an invalid instance,
// kSolver if the line search fails on the first (smoothest) stage or values
// become non-finite.
OracleResult OracleSolve(OracleProgram program, const ProblemInstance& inst,
                         const OracleConfig& cfg = {});

inline OracleResult OracleShapeFit(const ProblemInstance& inst,
                                   const OracleConfig& cfg = {}) {
  return OracleSolve(OracleProgram::kShapeFit, inst, cfg);
}
inline OracleResult OracleLud(const ProblemInstance& inst,
                              const OracleConfig& cfg = {}) {
  return OracleSolve(OracleProgram::kLud, inst, cfg);
}

}  // namespace shapefit

#endif  // SHAPEFIT_ORACLE_HPP_
