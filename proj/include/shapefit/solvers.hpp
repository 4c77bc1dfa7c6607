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

#ifndef SHAPEFIT_SOLVERS_HPP_
#define SHAPEFIT_SOLVERS_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "shapefit/admm.hpp"
#include "shapefit/model.hpp"

namespace shapefit {

enum class Algorithm { kShapeFit, kShapeKick, kLud };

std::string_view AlgorithmName(Algorithm algo);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

// Phased ADMM: each phase runs until the edge iterates stagnate, then the
// penalty is multiplied by kick_factor (scaled duals rescaled to match).
struct KickConfig {
  double rho0 = 1e-2;
  double kick_factor = 10.0;
  // Stagnation: ‖ΔY‖_F / max(1, ‖Y‖_F) < stagnation_tol for this many
  // consecutive iterations.
  int stagnation_window = 5;
  double stagnation_tol = 2e-3;
  // At most max_kicks + 1 phases. The last phase ignores stagnation and runs
  // to tolerance or final_phase_max_iters.
  int max_kicks = 6;
  int phase_max_iters = 500;
  int final_phase_max_iters = 500;
  std::optional<double> eps_primal;
  std::optional<double> eps_dual;
};

void CheckConfig(const KickConfig& cfg);

// Σ_k ‖P_{v_k⊥}(t_i - t_j)‖.
double ShapeFitObjective(const DirectionGraph& graph, const Matrix& points);

// Σ_k min_{δ >= 1} ‖t_i - t_j - δ v_k‖.
double LudObjective(const DirectionGraph& graph, const Matrix& points);

// Joint prox over (y, δ >= 1) of ‖y - δ v‖ + (rho/2)‖z - y‖².
//
// For fixed δ the minimum over y is the Huber envelope h(‖z - δ v‖), which is
// increasing in its argument, so the optimal δ minimizes ‖z - δ v‖ over
// [1, ∞): δ* = max(1, <z, v>). Then y = δ* v + shrink(z - δ* v, 1/rho), with
// shrink the Euclidean block soft-threshold.
class LudProx final : public EdgeProx {
 public:
  void Apply(const DirectionGraph& graph, const Matrix& z, double rho,
             Matrix& y) override;
  // δ_k from the latest Apply; all >= 1.
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> scales_;
};

// ADMM state is kept in a gauge where Σ_k <t_i - t_j, v_k> = m (m = edge
// count), so typical edge vectors are O(1) and rho is dimensionless. Reports
// are rescaled to Σ_k <t_i - t_j, v_k> = 1. Observers see the internal state.
double ShapeFitInternalScale(const DirectionGraph& graph);

SolveReport SolveShapeFit(const ProblemInstance& inst,
                          const AdmmConfig& cfg = {},
                          const IterationObserver& observer = {});

SolveReport SolveShapeKick(const ProblemInstance& inst,
                           const KickConfig& cfg = {},
                           const IterationObserver& observer = {});

// LUD schedule: rho 1e-2 kicked up to 10, then run to tolerance (capped at
// 20000 iterations in the last phase).
KickConfig LudDefaultSchedule();

// LUD runs with the translation constraint only (its scale is pinned by
// δ >= 1) under a kicking schedule; kick_factor = 1 gives plain ADMM. The
// final iterate is rescaled to the best point on its ray. The reported
// objective is the LUD objective at that native scale; the reported
// locations are rescaled into the ShapeFit gauge.
SolveReport SolveLud(const ProblemInstance& inst,
                     const KickConfig& cfg = LudDefaultSchedule(),
                     const IterationObserver& observer = {});

struct SolveOptions {
  Algorithm algo = Algorithm::kShapeFit;
  AdmmConfig admm;
  KickConfig kick;
  KickConfig lud = LudDefaultSchedule();
};

SolveReport Solve(const ProblemInstance& inst, const SolveOptions& options);

}  // namespace shapefit

#endif  // SHAPEFIT_SOLVERS_HPP_
