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

#ifndef SHAPEFIT_ADMM_HPP_
#define SHAPEFIT_ADMM_HPP_

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "shapefit/model.hpp"

namespace shapefit {

// Row k of the result is t_i - t_j for the k-th edge (i, j).
Matrix IncidenceApply(const DirectionGraph& graph, const Matrix& points);
// Adjoint of IncidenceApply: scatters +z_k to vertex i and -z_k to vertex j.
Matrix IncidenceAdjoint(const DirectionGraph& graph, const Matrix& edge_values);

// Solves L X = rhs on the mean-zero subspace, where L is the (unweighted)
// graph Laplacian. The Laplacian is grounded at vertex 0 and factored once
// with a sparse LDL^T; solutions are re-centered afterwards, which yields
// L^+ rhs whenever rhs has zero column sums.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const DirectionGraph& graph);
  ~LaplacianSolver();
  LaplacianSolver(LaplacianSolver&&) noexcept;
  LaplacianSolver& operator=(LaplacianSolver&&) noexcept;

  Matrix Solve(const Matrix& rhs) const;

 private:
  struct Factor;
  std::unique_ptr<Factor> factor_;
  int num_vertices_;
};

enum class GaugeMode {
  // Σ t_i = 0 only.
  kTranslation,
  // Σ t_i = 0 and Σ_k <t_i - t_j, v_k> = scale.
  kTranslationAndScale,
};

// Exact minimizer of ‖R T - B‖_F^2 over the gauge set. The scale constraint
// is handled with a precomputed correction direction u = L^+ R^T V: each call
// costs one Laplacian back-substitution plus a rank-1 correction along u.
class GaugeLeastSquares {
 public:
  GaugeLeastSquares(const DirectionGraph& graph, GaugeMode mode, double scale);

  Matrix Solve(const Matrix& edge_targets) const;

  // Minimizer for B = 0: scale * u / <R^T V, u> (or zero without the scale
  // constraint).
  const Matrix& base_point() const { return base_point_; }
  GaugeMode mode() const { return mode_; }
  double scale() const { return scale_; }
  const DirectionGraph& graph() const { return *graph_; }

 private:
  const DirectionGraph* graph_;
  GaugeMode mode_;
  double scale_;
  LaplacianSolver laplacian_;
  Matrix scale_gradient_;  // R^T V
  Matrix correction_;      // L^+ R^T V
  double correction_gain_ = 0.0;
  Matrix base_point_;
};

// Proximal map of y -> ‖P_{v⊥} y‖ with weight rho/2 on ‖z - y‖^2: keeps the
// component along v and block-soft-thresholds the orthogonal part by 1/rho.
// Throws if v is not unit length.
Eigen::RowVectorXd ShrinkProx(const Eigen::RowVectorXd& z,
                              const Eigen::RowVectorXd& v, double rho);

// Edgewise proximal update Y <- prox(Z, rho). Implementations may keep
// auxiliary per-edge state (LUD scales).
class EdgeProx {
 public:
  virtual ~EdgeProx() = default;
  virtual void Apply(const DirectionGraph& graph, const Matrix& z, double rho,
                     Matrix& y) = 0;
};

class ShapeFitProx final : public EdgeProx {
 public:
  void Apply(const DirectionGraph& graph, const Matrix& z, double rho,
             Matrix& y) override;
};

struct SolverState {
  Matrix T;
  Matrix Y;
  Matrix Lambda;  // scaled duals
  double rho = 1.0;
  int iter = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  // ‖Y_k - Y_{k-1}‖_F / max(1, ‖Y_{k-1}‖_F) for the latest step.
  double y_relative_change = 0.0;
};

struct AdmmConfig {
  double rho0 = 1.0;
  int max_iters = 20000;
  // Defaults to 1e-10 * sqrt(m * d) when unset.
  std::optional<double> eps_primal;
  std::optional<double> eps_dual;
  double relaxation = 1.0;
};

void CheckConfig(const AdmmConfig& cfg);

// Changes the penalty and rescales the scaled duals so the unscaled
// multipliers rho * Lambda are unchanged.
void RescalePenalty(SolverState& state, double new_rho);

class AdmmEngine {
 public:
  AdmmEngine(const DirectionGraph& graph, GaugeMode mode, double scale);

  // T = base point, Y = R T, Lambda = 0.
  SolverState Initialize(double rho) const;

  // One cycle: T-update, relaxed edge values, prox, dual ascent, residuals.
  void Step(SolverState& state, EdgeProx& prox, double relaxation = 1.0) const;

  const GaugeLeastSquares& t_update() const { return t_update_; }
  const DirectionGraph& graph() const { return *graph_; }

 private:
  const DirectionGraph* graph_;
  GaugeLeastSquares t_update_;
};

enum class Control { kContinue, kStop };

// Called after every iteration. May mutate the state (e.g. via
// RescalePenalty) or stop the run.
using IterationObserver = std::function<Control(SolverState&)>;

struct RunOutcome {
  SolverState state;
  bool converged = false;
};

double DefaultTolerance(const DirectionGraph& graph);

// Iterates Step until both residuals are below tolerance, the observer stops
// the run, or max_iters is reached. Starts from Initialize(cfg.rho0) unless
// an initial state is supplied.
RunOutcome RunAdmm(const AdmmEngine& engine, EdgeProx& prox,
                   const AdmmConfig& cfg,
                   const IterationObserver& observer = {},
                   std::optional<SolverState> initial = std::nullopt);

}  // namespace shapefit

#endif  // SHAPEFIT_ADMM_HPP_
