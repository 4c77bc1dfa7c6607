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

#include "shapefit/admm.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace shapefit {

Matrix IncidenceApply(const DirectionGraph& graph, const Matrix& points) {
  if (points.rows() != graph.num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument,
                "incidence: expected " + std::to_string(graph.num_vertices()) +
                    " rows, got " + std::to_string(points.rows()));
  }
  const Eigen::Index d = points.cols();
  Matrix out(graph.num_edges(), d);
  const auto& edges = graph.edges();
  const double* src = points.data();
  double* dst = out.data();
  for (int k = 0; k < graph.num_edges(); ++k, dst += d) {
    const double* a = src + edges[k].i * d;
    const double* b = src + edges[k].j * d;
    for (Eigen::Index c = 0; c < d; ++c) dst[c] = a[c] - b[c];
  }
  return out;
}

Matrix IncidenceAdjoint(const DirectionGraph& graph, const Matrix& edge_values) {
  if (edge_values.rows() != graph.num_edges()) {
    throw Error(ErrorCode::kInvalidArgument,
                "incidence adjoint: expected " +
                    std::to_string(graph.num_edges()) + " rows, got " +
                    std::to_string(edge_values.rows()));
  }
  const Eigen::Index d = edge_values.cols();
  Matrix out = Matrix::Zero(graph.num_vertices(), d);
  const auto& edges = graph.edges();
  const double* src = edge_values.data();
  double* dst = out.data();
  for (int k = 0; k < graph.num_edges(); ++k, src += d) {
    double* a = dst + edges[k].i * d;
    double* b = dst + edges[k].j * d;
    for (Eigen::Index c = 0; c < d; ++c) {
      a[c] += src[c];
      b[c] -= src[c];
    }
  }
  return out;
}

struct LaplacianSolver::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

LaplacianSolver::LaplacianSolver(const DirectionGraph& graph)
    : factor_(std::make_unique<Factor>()),
      num_vertices_(graph.num_vertices()) {
  if (!graph.IsConnected()) {
    throw Error(ErrorCode::kDisconnected,
                "Laplacian solve needs a connected graph");
  }
  // Vertex 0 is grounded: rows/cols 1..n-1 of L, re-indexed from 0.
  const int dim = num_vertices_ - 1;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * graph.num_edges());
  for (const Edge& e : graph.edges()) {
    const int a = e.i - 1;
    const int b = e.j - 1;
    if (a >= 0) triplets.emplace_back(a, a, 1.0);
    if (b >= 0) triplets.emplace_back(b, b, 1.0);
    if (a >= 0 && b >= 0) {
      triplets.emplace_back(a, b, -1.0);
      triplets.emplace_back(b, a, -1.0);
    }
  }
  Eigen::SparseMatrix<double> grounded(dim, dim);
  grounded.setFromTriplets(triplets.begin(), triplets.end());
  factor_->ldlt.compute(grounded);
  if (factor_->ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolver, "Laplacian factorization failed");
  }
}

LaplacianSolver::~LaplacianSolver() = default;
LaplacianSolver::LaplacianSolver(LaplacianSolver&&) noexcept = default;
LaplacianSolver& LaplacianSolver::operator=(LaplacianSolver&&) noexcept =
    default;

Matrix LaplacianSolver::Solve(const Matrix& rhs) const {
  const int dim = num_vertices_ - 1;
  const Eigen::MatrixXd reduced = rhs.bottomRows(dim);
  const Eigen::MatrixXd x = factor_->ldlt.solve(reduced);
  if (factor_->ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolver, "Laplacian back-substitution failed");
  }
  Matrix out(num_vertices_, rhs.cols());
  out.row(0).setZero();
  out.bottomRows(dim) = x;
  out.rowwise() -= out.colwise().mean();
  return out;
}

GaugeLeastSquares::GaugeLeastSquares(const DirectionGraph& graph,
                                     GaugeMode mode, double scale)
    : graph_(&graph), mode_(mode), scale_(scale), laplacian_(graph) {
  const int n = graph.num_vertices();
  const int d = graph.dimension();
  base_point_ = Matrix::Zero(n, d);
  if (mode_ == GaugeMode::kTranslation) return;

  if (!(scale_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gauge scale must be positive");
  }
  scale_gradient_ = IncidenceAdjoint(graph, graph.directions());
  correction_ = laplacian_.Solve(scale_gradient_);
  correction_gain_ = (scale_gradient_.array() * correction_.array()).sum();
  // <g, L^+ g> vanishes only if every direction sum cancels at each vertex.
  if (!(correction_gain_ > 1e-300)) {
    throw Error(ErrorCode::kSolver,
                "scale constraint is degenerate for these directions");
  }
  base_point_ = correction_ * (scale_ / correction_gain_);
}

Matrix GaugeLeastSquares::Solve(const Matrix& edge_targets) const {
  Matrix t = laplacian_.Solve(IncidenceAdjoint(*graph_, edge_targets));
  if (mode_ == GaugeMode::kTranslationAndScale) {
    const double current = (t.array() * scale_gradient_.array()).sum();
    t -= correction_ * ((current - scale_) / correction_gain_);
  }
  return t;
}

Eigen::RowVectorXd ShrinkProx(const Eigen::RowVectorXd& z,
                              const Eigen::RowVectorXd& v, double rho) {
  if (z.size() != v.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prox: dimension mismatch");
  }
  if (std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "prox: direction is not unit");
  }
  if (!(rho > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prox: rho must be positive");
  }
  const Eigen::RowVectorXd along = z.dot(v) * v;
  const Eigen::RowVectorXd ortho = z - along;
  const double r = ortho.norm();
  const double keep = r > 1.0 / rho ? 1.0 - 1.0 / (rho * r) : 0.0;
  return along + keep * ortho;
}

void ShapeFitProx::Apply(const DirectionGraph& graph, const Matrix& z,
                         double rho, Matrix& y) {
  const double threshold = 1.0 / rho;
  const Eigen::Index d = z.cols();
  y.resize(z.rows(), d);
  const double* zp = z.data();
  const double* vp = graph.directions().data();
  double* yp = y.data();
  for (Eigen::Index k = 0; k < z.rows(); ++k, zp += d, vp += d, yp += d) {
    double a = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) a += zp[c] * vp[c];
    double r2 = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double w = zp[c] - a * vp[c];
      r2 += w * w;
    }
    const double r = std::sqrt(r2);
    const double keep = r > threshold ? 1.0 - threshold / r : 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      yp[c] = a * vp[c] + keep * (zp[c] - a * vp[c]);
    }
  }
}

void CheckConfig(const AdmmConfig& cfg) {
  if (!(cfg.rho0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho0 must be positive");
  }
  if (cfg.max_iters <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be positive");
  }
  if ((cfg.eps_primal && !(*cfg.eps_primal > 0.0)) ||
      (cfg.eps_dual && !(*cfg.eps_dual > 0.0))) {
    throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
  }
  if (!(cfg.relaxation > 0.0 && cfg.relaxation < 2.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "relaxation factor must lie in (0, 2)");
  }
}

void RescalePenalty(SolverState& state, double new_rho) {
  if (!(new_rho > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must be positive");
  }
  state.Lambda *= state.rho / new_rho;
  state.rho = new_rho;
}

AdmmEngine::AdmmEngine(const DirectionGraph& graph, GaugeMode mode,
                       double scale)
    : graph_(&graph), t_update_(graph, mode, scale) {}

SolverState AdmmEngine::Initialize(double rho) const {
  SolverState s;
  s.T = t_update_.base_point();
  s.Y = IncidenceApply(*graph_, s.T);
  s.Lambda = Matrix::Zero(s.Y.rows(), s.Y.cols());
  s.rho = rho;
  return s;
}

void AdmmEngine::Step(SolverState& state, EdgeProx& prox,
                      double relaxation) const {
  state.T = t_update_.Solve(state.Y - state.Lambda);
  Matrix rt = IncidenceApply(*graph_, state.T);
  if (relaxation != 1.0) {
    rt = relaxation * rt + (1.0 - relaxation) * state.Y;
  }
  const Matrix z = rt + state.Lambda;
  Matrix y_new;
  prox.Apply(*graph_, z, state.rho, y_new);

  const Matrix y_delta = y_new - state.Y;
  const double y_old_norm = state.Y.norm();
  state.y_relative_change = y_delta.norm() / std::max(1.0, y_old_norm);
  state.dual_residual = state.rho * IncidenceAdjoint(*graph_, y_delta).norm();

  const Matrix gap = rt - y_new;
  state.primal_residual = gap.norm();
  state.Lambda += gap;
  state.Y = std::move(y_new);
  ++state.iter;
}

double DefaultTolerance(const DirectionGraph& graph) {
  return 1e-10 * std::sqrt(static_cast<double>(graph.num_edges()) *
                           graph.dimension());
}

RunOutcome RunAdmm(const AdmmEngine& engine, EdgeProx& prox,
                   const AdmmConfig& cfg, const IterationObserver& observer,
                   std::optional<SolverState> initial) {
  CheckConfig(cfg);
  const double tol = DefaultTolerance(engine.graph());
  const double eps_primal = cfg.eps_primal.value_or(tol);
  const double eps_dual = cfg.eps_dual.value_or(tol);

  RunOutcome out{initial ? std::move(*initial) : engine.Initialize(cfg.rho0),
                 false};
  SolverState& state = out.state;
  for (int k = 0; k < cfg.max_iters; ++k) {
    engine.Step(state, prox, cfg.relaxation);
    if (state.primal_residual < eps_primal && state.dual_residual < eps_dual) {
      out.converged = true;
    }
    if (observer && observer(state) == Control::kStop) break;
    if (out.converged) break;
  }
  return out;
}

}  // namespace shapefit
