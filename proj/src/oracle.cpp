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

#include "shapefit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace shapefit {
namespace {

// All oracle arithmetic runs in extended precision. With eps down to 1e-12
// the Newton systems carry condition numbers near 1e12, which leaves too few
// correct digits in double for weakly determined minimizers.
using Real = long double;
using RMatrix =
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RSquare = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Per-edge smoothed term h = sqrt(|r|^2 + eps^2) with residual
//   ShapeFit: r = P_{v⊥} x
//   LUD:      r = x - max(1, <x, v>) v   (x minus its projection onto the
//             ray {δ v : δ >= 1}, which is how δ is eliminated)
// Writes dh/dx into gx and, if hx is not null, the d x d Hessian into hx.
// With J = dr/dx (P_{v⊥} or, for LUD with <x, v> < 1, the identity):
//   dh/dx = J r / h,   d2h/dx2 = J (I - r r^T / h^2) J / h.
Real EdgeTerm(OracleProgram program, const RVector& x, const RVector& v,
              Real eps, RVector& gx, RSquare* hx) {
  const int d = static_cast<int>(x.size());
  const Real a = x.dot(v);
  const bool clamped = program == OracleProgram::kLud && a < 1;
  const RVector r = clamped ? RVector(x - v) : RVector(x - a * v);
  const Real h = std::sqrt(r.squaredNorm() + eps * eps);
  if (!(h > 0)) {
    gx.setZero(d);
    if (hx) hx->setZero(d, d);
    return 0;
  }
  gx = r / h;  // r already lies in the range of J
  if (hx) {
    RSquare j = RSquare::Identity(d, d);
    if (!clamped) j -= v * v.transpose();
    const RSquare inner =
        (RSquare::Identity(d, d) - r * r.transpose() / (h * h)) / h;
    *hx = j * inner * j;
  }
  return h;
}

class Program {
 public:
  Program(OracleProgram program, const DirectionGraph& graph)
      : program_(program),
        graph_(&graph),
        n_(graph.num_vertices()),
        d_(graph.dimension()),
        directions_(graph.directions().cast<Real>()) {
    // Unit in double is not unit in long double. The residual of an active
    // edge is ~eps, so a leftover component along v of ~1e-17 would dominate
    // its gradient.
    directions_.rowwise().normalize();
  }

  Real Evaluate(const RMatrix& points, Real eps, RMatrix* gradient,
                RSquare* hessian) const {
    if (gradient) *gradient = RMatrix::Zero(n_, d_);
    if (hessian) *hessian = RSquare::Zero(n_ * d_, n_ * d_);
    RVector gx;
    RSquare hx;
    Real total = 0;
    for (int k = 0; k < graph_->num_edges(); ++k) {
      const Edge& e = graph_->edges()[k];
      const RVector x = (points.row(e.i) - points.row(e.j)).transpose();
      const RVector v = directions_.row(k).transpose();
      total += EdgeTerm(program_, x, v, eps, gx, hessian ? &hx : nullptr);
      if (gradient) {
        gradient->row(e.i) += gx.transpose();
        gradient->row(e.j) -= gx.transpose();
      }
      if (hessian) {
        hessian->block(e.i * d_, e.i * d_, d_, d_) += hx;
        hessian->block(e.j * d_, e.j * d_, d_, d_) += hx;
        hessian->block(e.i * d_, e.j * d_, d_, d_) -= hx;
        hessian->block(e.j * d_, e.i * d_, d_, d_) -= hx;
      }
    }
    return total;
  }

 private:
  OracleProgram program_;
  const DirectionGraph* graph_;
  int n_;
  int d_;
  RMatrix directions_;
};

// The feasible set is affine: {Σ t = 0} and, for ShapeFit, additionally
// <N, T> = 1 with N the gradient of Σ_k <t_i - t_j, v_k>.
class GaugeSet {
 public:
  GaugeSet(OracleProgram program, const DirectionGraph& graph)
      : has_scale_(program == OracleProgram::kShapeFit),
        n_(graph.num_vertices()),
        d_(graph.dimension()) {
    normal_ = RMatrix::Zero(n_, d_);
    for (int k = 0; k < graph.num_edges(); ++k) {
      const Edge& e = graph.edges()[k];
      normal_.row(e.i) += graph.direction(k).cast<Real>();
      normal_.row(e.j) -= graph.direction(k).cast<Real>();
    }
    normal_sq_ = normal_.squaredNorm();

    // Orthonormal basis of the tangent space, from the SVD of the
    // constraint rows.
    const int rows = d_ + (has_scale_ ? 1 : 0);
    RSquare c = RSquare::Zero(rows, n_ * d_);
    for (int i = 0; i < n_; ++i) {
      for (int col = 0; col < d_; ++col) c(col, i * d_ + col) = 1;
    }
    if (has_scale_) {
      for (int i = 0; i < n_ * d_; ++i) c(d_, i) = normal_.data()[i];
    }
    Eigen::JacobiSVD<RSquare> svd(c, Eigen::ComputeFullV);
    const int rank = static_cast<int>(svd.rank());
    basis_ = svd.matrixV().rightCols(n_ * d_ - rank);
  }

  bool has_scale() const { return has_scale_; }
  const RMatrix& normal() const { return normal_; }
  Real normal_sq() const { return normal_sq_; }
  const RSquare& basis() const { return basis_; }

  void ProjectPoint(RMatrix& m) const {
    m.rowwise() -= m.colwise().mean();
    if (has_scale_) {
      const Real s = (m.array() * normal_.array()).sum();
      m += normal_ * ((1 - s) / normal_sq_);
    }
  }

 private:
  bool has_scale_;
  int n_;
  int d_;
  RMatrix normal_;
  Real normal_sq_ = 0;
  RSquare basis_;
};

RVector Flat(const RMatrix& m) {
  return Eigen::Map<const RVector>(m.data(), m.size());
}

void CheckShape(const DirectionGraph& graph, const Matrix& points) {
  if (points.rows() != graph.num_vertices() ||
      points.cols() != graph.dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle: point matrix does not match the graph");
  }
}

}  // namespace

void CheckConfig(const OracleConfig& cfg) {
  if (cfg.eps_schedule.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "eps schedule is empty");
  }
  for (std::size_t i = 0; i < cfg.eps_schedule.size(); ++i) {
    if (!(cfg.eps_schedule[i] > 0.0) ||
        (i > 0 && !(cfg.eps_schedule[i] < cfg.eps_schedule[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "eps schedule must be positive and strictly decreasing");
    }
  }
  if (cfg.max_inner_iters <= 0 || !(cfg.gradient_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle iteration cap and tolerance must be positive");
  }
}

double SmoothedObjective(OracleProgram program, const DirectionGraph& graph,
                         const Matrix& points, double eps, Matrix* gradient) {
  CheckShape(graph, points);
  const Program prog(program, graph);
  RMatrix grad;
  const Real f = prog.Evaluate(points.cast<Real>(), eps,
                               gradient ? &grad : nullptr, nullptr);
  if (gradient) *gradient = grad.cast<double>();
  return static_cast<double>(f);
}

double ExactObjective(OracleProgram program, const DirectionGraph& graph,
                      const Matrix& points) {
  return SmoothedObjective(program, graph, points, 0.0);
}

OracleResult OracleSolve(OracleProgram program, const ProblemInstance& inst,
                         const OracleConfig& cfg) {
  CheckConfig(cfg);
  const DirectionGraph& g = inst.graph;
  if (g.num_vertices() > kOracleMaxVertices) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle accepts at most " + std::to_string(kOracleMaxVertices) +
                    " vertices, got " + std::to_string(g.num_vertices()));
  }
  RequireSolvable(inst);

  const Program prog(program, g);
  const GaugeSet gauge(program, g);
  if (gauge.has_scale() && !(gauge.normal_sq() > 0)) {
    throw Error(ErrorCode::kSolver, "scale constraint is degenerate");
  }
  const RSquare& q = gauge.basis();
  const int n = g.num_vertices();
  const int d = g.dimension();

  // Start at the minimum-norm point of the ShapeFit gauge set, stretched so
  // that typical edges have unit length along their directions.
  RMatrix t = gauge.normal() *
              (static_cast<Real>(std::max(1, g.num_edges())) / gauge.normal_sq());
  gauge.ProjectPoint(t);

  int accepted = 0;
  for (std::size_t stage = 0; stage < cfg.eps_schedule.size(); ++stage) {
    const Real eps = cfg.eps_schedule[stage];
    RMatrix grad;
    RSquare hess;
    Real f = prog.Evaluate(t, eps, &grad, &hess);

    for (int it = 0; it < cfg.max_inner_iters; ++it) {
      const RVector gr = q.transpose() * Flat(grad);
      if (!std::isfinite(static_cast<double>(f)) || !gr.allFinite()) {
        throw Error(ErrorCode::kSolver, "oracle produced non-finite values");
      }
      if (gr.norm() <= cfg.gradient_tol) break;

      // Newton direction in tangent coordinates, with eigenvalues floored
      // relative to the largest so near-flat directions stay bounded.
      const Eigen::SelfAdjointEigenSolver<RSquare> eig(q.transpose() * hess *
                                                       q);
      const RVector& lambda = eig.eigenvalues();
      const Real floor = std::max<Real>(lambda.maxCoeff(), 1) * 1e-17L;
      const RSquare& u = eig.eigenvectors();
      const RVector newton =
          -u * ((u.transpose() * gr).array() / lambda.array().max(floor))
                   .matrix();

      // Projected gradient is the fallback when the Newton step fails.
      bool found = false;
      RMatrix trial;
      for (const RVector& p : {newton, RVector(-gr)}) {
        const Real slope = p.dot(gr);
        if (!p.allFinite() || !(slope < 0)) continue;
        const RVector step_full = q * p;
        const RMatrix step = Eigen::Map<const RMatrix>(step_full.data(), n, d);
        Real alpha = 1;
        for (int halving = 0; halving < 100 && !found; ++halving) {
          trial = t + alpha * step;
          gauge.ProjectPoint(trial);
          const Real trial_f = prog.Evaluate(trial, eps, nullptr, nullptr);
          // Strict decrease: a step that leaves f unchanged means the stage
          // has reached rounding level.
          found = trial_f < f && trial_f <= f + Real(1e-4) * alpha * slope;
          alpha /= 2;
        }
        if (found) break;
      }
      if (!found) {
        // Later stages stall at rounding level; the first one must not.
        if (stage == 0 && it == 0) {
          throw Error(ErrorCode::kSolver, "oracle line search failed");
        }
        break;
      }
      t = std::move(trial);
      f = prog.Evaluate(t, eps, &grad, &hess);
      ++accepted;
    }
  }

  OracleResult out{PointCloud(t.cast<double>())};
  out.objective = static_cast<double>(prog.Evaluate(t, 0, nullptr, nullptr));
  out.iterations = accepted;
  return out;
}

}  // namespace shapefit
