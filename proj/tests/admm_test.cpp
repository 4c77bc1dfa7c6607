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

#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "shapefit/admm.hpp"
#include "shapefit/metrics.hpp"
#include "shapefit/solvers.hpp"
#include "test_util.hpp"

namespace shapefit {
namespace {

using Dense = Eigen::MatrixXd;
using testing::Instance;

// Incidence operator as a dense (m*d) x (n*d) matrix on row-major
// flattenings.
Dense DenseIncidence(const DirectionGraph& g) {
  const int d = g.dimension();
  Dense a = Dense::Zero(g.num_edges() * d, g.num_vertices() * d);
  for (int k = 0; k < g.num_edges(); ++k) {
    for (int c = 0; c < d; ++c) {
      a(k * d + c, g.edges()[k].i * d + c) = 1;
      a(k * d + c, g.edges()[k].j * d + c) = -1;
    }
  }
  return a;
}

Eigen::VectorXd Flat(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Matrix Unflat(const Eigen::VectorXd& v, int rows, int cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Equality-constrained least squares by a dense KKT solve:
// min ‖A x - b‖² s.t. Σ t = 0 and <A x, vec(V)> = scale.
Matrix DenseGaugeLeastSquares(const DirectionGraph& g, const Matrix& b,
                              double scale) {
  const int n = g.num_vertices();
  const int d = g.dimension();
  const Dense a = DenseIncidence(g);
  Dense c = Dense::Zero(d + 1, n * d);
  for (int i = 0; i < n; ++i) {
    for (int col = 0; col < d; ++col) c(col, i * d + col) = 1;
  }
  c.row(d) = (a.transpose() * Flat(g.directions())).transpose();
  Eigen::VectorXd rhs_c = Eigen::VectorXd::Zero(d + 1);
  rhs_c(d) = scale;

  const int nv = n * d;
  Dense kkt = Dense::Zero(nv + d + 1, nv + d + 1);
  kkt.topLeftCorner(nv, nv) = 2 * a.transpose() * a;
  kkt.topRightCorner(nv, d + 1) = c.transpose();
  kkt.bottomLeftCorner(d + 1, nv) = c;
  Eigen::VectorXd rhs(nv + d + 1);
  rhs << 2 * a.transpose() * Flat(b), rhs_c;
  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  return Unflat(sol.head(nv), n, d);
}

Dense DenseLaplacian(const DirectionGraph& g) {
  Dense l = Dense::Zero(g.num_vertices(), g.num_vertices());
  for (const Edge& e : g.edges()) {
    l(e.i, e.i) += 1;
    l(e.j, e.j) += 1;
    l(e.i, e.j) -= 1;
    l(e.j, e.i) -= 1;
  }
  return l;
}

TEST_CASE("incidence examples") {
  Matrix t(2, 3);
  t << 0, 0, 0, 1, 0, 0;
  Matrix v(1, 3);
  v << -1, 0, 0;
  const DirectionGraph g(2, {{0, 1}}, v);
  const Matrix rt = IncidenceApply(g, t);
  CHECK(rt.rows() == 1);
  CHECK(rt(0, 0) == -1.0);
  CHECK(rt.row(0).tail(2).isZero());
  CHECK(IncidenceApply(g, Matrix::Zero(2, 3)).isZero());
  CHECK_THROWS_AS(IncidenceApply(g, Matrix::Zero(3, 3)), Error);
}

TEST_CASE("property: incidence adjoint identity") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ProblemInstance inst = Instance(10, 0.5, 0.2, 0.1, 100 + trial);
    const DirectionGraph& g = inst.graph;
    const Matrix t = testing::RandomMatrix(rng, 10, 3);
    const Matrix z = testing::RandomMatrix(rng, g.num_edges(), 3);
    const Matrix rt = IncidenceApply(g, t);
    const double lhs = (rt.array() * z.array()).sum();
    const double rhs = (t.array() * IncidenceAdjoint(g, z).array()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * rt.norm() * z.norm());
  }
}

TEST_CASE("property: Laplacian solve against the dense Laplacian") {
  Rng rng(3);
  for (int n : {2, 5, 17, 60, 100}) {
    const ProblemInstance inst = Instance(n, n < 10 ? 1.0 : 0.2, 0, 0, n);
    const DirectionGraph& g = inst.graph;
    const LaplacianSolver solver(g);
    const Matrix b = testing::RandomMatrix(rng, g.num_edges(), 3);
    const Matrix rhs = IncidenceAdjoint(g, b);  // mean-zero columns
    const Matrix x = solver.Solve(rhs);
    const Dense l = DenseLaplacian(g);
    CHECK((l * x - rhs).norm() <= 1e-10 * rhs.norm());
    CHECK(x.colwise().sum().norm() <= 1e-10 * (1 + x.norm()));
  }
}

TEST_CASE("T-update matches a dense KKT solve") {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance inst = Instance(5, 1, 0.2, 0.05, seed);
    const DirectionGraph& g = inst.graph;
    for (double scale : {1.0, 10.0}) {
      const GaugeLeastSquares ls(g, GaugeMode::kTranslationAndScale, scale);
      const Matrix b = testing::RandomMatrix(rng, g.num_edges(), 3);
      const Matrix t = ls.Solve(b);
      const Matrix ref = DenseGaugeLeastSquares(g, b, scale);
      CHECK((t - ref).norm() <= 1e-8 * (1 + ref.norm()));
      const GaugeDefect def = MeasureGauge(g, t / scale);
      CHECK(def.translation <= 1e-10);
      CHECK(def.scale <= 1e-10);
    }
  }
}

TEST_CASE("T-update recovers T* from B = R T* + c V") {
  Rng rng(9);
  const ProblemInstance inst = Instance(30, 0.3, 0.2, 0.05, 4);
  const DirectionGraph& g = inst.graph;
  const GaugeLeastSquares ls(g, GaugeMode::kTranslationAndScale, 1.0);
  // Any point of the gauge set.
  Matrix t_star = testing::RandomMatrix(rng, 30, 3);
  t_star.rowwise() -= t_star.colwise().mean();
  const double s = (IncidenceApply(g, t_star).array() * g.directions().array()).sum();
  t_star /= s;
  for (double c : {0.0, 0.7, -3.0}) {
    const Matrix b = IncidenceApply(g, t_star) + c * g.directions();
    CHECK((ls.Solve(b) - t_star).norm() <= 1e-8 * t_star.norm());
  }
}

TEST_CASE("B = 0 gives the scaled Laplacian direction") {
  const ProblemInstance inst = Instance(12, 0.5, 0.3, 0.05, 6);
  const DirectionGraph& g = inst.graph;
  const GaugeLeastSquares ls(g, GaugeMode::kTranslationAndScale, 1.0);
  const Dense l = DenseLaplacian(g);
  const Matrix rtv = IncidenceAdjoint(g, g.directions());
  // Dense pseudo-inverse applied column by column.
  const Dense pinv = l.completeOrthogonalDecomposition().pseudoInverse();
  Matrix u = pinv * rtv;
  u.rowwise() -= u.colwise().mean();
  const double denom = (IncidenceApply(g, u).array() * g.directions().array()).sum();
  const Matrix expect = u / denom;
  const Matrix got = ls.Solve(Matrix::Zero(g.num_edges(), 3));
  CHECK((got - expect).norm() <= 1e-8 * expect.norm());
  CHECK((ls.base_point() - expect).norm() <= 1e-8 * expect.norm());
}

TEST_CASE("translation-only gauge") {
  Rng rng(10);
  const ProblemInstance inst = Instance(8, 1, 0, 0, 2);
  const GaugeLeastSquares ls(inst.graph, GaugeMode::kTranslation, 1.0);
  const Matrix b = testing::RandomMatrix(rng, inst.graph.num_edges(), 3);
  const Matrix t = ls.Solve(b);
  CHECK(t.colwise().sum().norm() <= 1e-12);
  // Normal equations: R^T (R T - B) = 0.
  CHECK(IncidenceAdjoint(inst.graph, IncidenceApply(inst.graph, t) - b).norm() <=
        1e-10 * b.norm());
}

TEST_CASE("shrink prox examples") {
  const Eigen::RowVectorXd v = Eigen::RowVector3d(1, 0, 0);
  CHECK((ShrinkProx(Eigen::RowVector3d(2, 3, 0), v, 1.0) -
         Eigen::RowVector3d(2, 2, 0))
            .norm() <= 1e-15);
  const Eigen::RowVectorXd par = Eigen::RowVector3d(-4, 0, 0);
  CHECK(ShrinkProx(par, v, 0.3) == par);
  CHECK(ShrinkProx(Eigen::RowVector3d(0, 0.3, 0.4), v, 2.0).isZero());
  CHECK_THROWS_AS(ShrinkProx(par, Eigen::RowVector3d(2, 0, 0), 1.0), Error);
}

TEST_CASE("shrink prox example against a fine grid search") {
  // min over y of ‖P_{v⊥} y‖ + (rho/2)‖z - y‖² for v=(1,0,0), z=(2,3,0),
  // rho=1. The objective separates: y_x = 2, y_z = 0, and y_y minimizes
  // |y| + (3 - y)²/2.
  double best_y = 0, best_f = 1e300;
  for (int k = 0; k <= 400000; ++k) {
    const double y = -1 + 5.0 * k / 400000;
    const double f = std::abs(y) + 0.5 * (3 - y) * (3 - y);
    if (f < best_f) {
      best_f = f;
      best_y = y;
    }
  }
  const Eigen::RowVectorXd out =
      ShrinkProx(Eigen::RowVector3d(2, 3, 0), Eigen::RowVector3d(1, 0, 0), 1);
  CHECK(std::abs(out(1) - best_y) <= 2e-5);
}

TEST_CASE("property: shrink prox beats random perturbations") {
  Rng rng(12);
  double worst = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::RowVectorXd v = testing::RandomUnit(rng, 3);
    const Eigen::RowVectorXd z = testing::RandomMatrix(rng, 1, 3).row(0) *
                                 std::pow(10.0, rng.Uniform() * 2 - 1);
    const double rho = std::pow(10.0, rng.Uniform() * 4 - 2);
    const auto f = [&](const Eigen::RowVectorXd& y) {
      return (y - y.dot(v) * v).norm() + 0.5 * rho * (z - y).squaredNorm();
    };
    const Eigen::RowVectorXd y = ShrinkProx(z, v, rho);
    const double fy = f(y);
    for (int k = 0; k < 100; ++k) {
      const double mag = std::pow(10.0, -8 + 8 * rng.Uniform());
      const Eigen::RowVectorXd dy = testing::RandomMatrix(rng, 1, 3).row(0) * mag;
      worst = std::min(worst, f(y + dy) - fy);
    }
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("engine fixed point is preserved") {
  const ProblemInstance inst = Instance(10, 1, 0, 0, 5);
  const DirectionGraph& g = inst.graph;
  const AdmmEngine engine(g, GaugeMode::kTranslationAndScale, 1.0);
  Matrix t = inst.truth->points();
  t.rowwise() -= t.colwise().mean();
  t /= (IncidenceApply(g, t).array() * g.directions().array()).sum();

  SolverState s = engine.Initialize(1.0);
  s.T = t;
  s.Y = IncidenceApply(g, t);
  s.Lambda = Matrix::Zero(g.num_edges(), 3);
  const SolverState before = s;
  ShapeFitProx prox;
  engine.Step(s, prox);
  CHECK((s.T - before.T).norm() <= 1e-12);
  CHECK((s.Y - before.Y).norm() <= 1e-12);
  CHECK((s.Lambda - before.Lambda).norm() <= 1e-12);
}

TEST_CASE("initial state is the closed-form gauge point") {
  const ProblemInstance inst = Instance(10, 0.6, 0.1, 0, 5);
  const AdmmEngine engine(inst.graph, GaugeMode::kTranslationAndScale, 1.0);
  const SolverState s = engine.Initialize(2.0);
  CHECK(s.T == engine.t_update().base_point());
  CHECK((s.Y - IncidenceApply(inst.graph, s.T)).norm() == 0.0);
  CHECK(s.Lambda.isZero());
  CHECK(s.rho == 2.0);
}

TEST_CASE("gauge constraints hold after every T-update") {
  const ProblemInstance inst = Instance(40, 0.3, 0.2, 0.01, 13);
  const DirectionGraph& g = inst.graph;
  const double scale = ShapeFitInternalScale(g);
  double worst = 0;
  AdmmConfig cfg;
  cfg.max_iters = 500;
  SolveShapeFit(inst, cfg, [&](SolverState& s) {
    const GaugeDefect d = MeasureGauge(g, s.T / scale);
    worst = std::max({worst, d.translation, d.scale});
    return Control::kContinue;
  });
  CHECK(worst <= 1e-10);
}

TEST_CASE("residuals fall below 1e-9 within 2000 iterations on an exact instance") {
  const ProblemInstance inst = Instance(20, 1, 0, 0, 1);
  AdmmConfig cfg;
  cfg.rho0 = 1.0;
  cfg.max_iters = 2000;
  const SolveReport r = SolveShapeFit(inst, cfg);
  CHECK(r.converged);
  CHECK(r.final_primal_residual < 1e-9);
  CHECK(r.final_dual_residual < 1e-9);
  CHECK(*r.rfe < 1e-9);
}

TEST_CASE("converged iterates satisfy the prox optimality condition") {
  const ProblemInstance inst = Instance(25, 0.5, 0.2, 0, 2);
  const DirectionGraph& g = inst.graph;
  std::optional<SolverState> last;
  const SolveReport r = SolveShapeFit(inst, {}, [&](SolverState& s) {
    last = s;
    return Control::kContinue;
  });
  REQUIRE(r.converged);
  // rho * Lambda must be a subgradient of ‖P_{v⊥} y‖ at y = Y.
  double worst = 0;
  for (int k = 0; k < g.num_edges(); ++k) {
    const Eigen::RowVectorXd y = last->Y.row(k);
    const Eigen::RowVectorXd back =
        ShrinkProx(y + last->Lambda.row(k), g.direction(k), last->rho);
    worst = std::max(worst, (back - y).norm());
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("two-point graph") {
  Matrix v(1, 3);
  v << 0, 0.6, 0.8;
  const ProblemInstance inst = testing::Wrap(DirectionGraph(2, {{0, 1}}, v));
  const SolveReport r = SolveShapeFit(inst);
  const Eigen::RowVectorXd x = r.locations.point(0) - r.locations.point(1);
  CHECK((x / x.norm() - v.row(0)).norm() <= 1e-12);
  const GaugeDefect d = MeasureGauge(inst.graph, r.locations.points());
  CHECK(d.translation <= 1e-12);
  CHECK(d.scale <= 1e-12);
}

TEST_CASE("n=50, p=0.5, q=0 is recovered exactly; halving eps keeps RFE") {
  const ProblemInstance inst = Instance(50, 0.5, 0, 0, 31);
  const SolveReport r = SolveShapeFit(inst);
  CHECK(*r.rfe < 1e-9);
  AdmmConfig half;
  half.eps_primal = 0.5 * DefaultTolerance(inst.graph);
  half.eps_dual = half.eps_primal;
  const SolveReport h = SolveShapeFit(inst, half);
  CHECK(*h.rfe <= 10 * *r.rfe);
}

TEST_CASE("penalty rescaling keeps the unscaled multipliers") {
  Rng rng(4);
  SolverState s{testing::RandomMatrix(rng, 3, 2), testing::RandomMatrix(rng, 4, 2),
                testing::RandomMatrix(rng, 4, 2)};
  s.rho = 0.5;
  const Matrix before = s.rho * s.Lambda;
  RescalePenalty(s, 8.0);
  CHECK(s.rho == 8.0);
  CHECK((s.rho * s.Lambda - before).norm() <= 1e-14 * before.norm());
  CHECK_THROWS_AS(RescalePenalty(s, 0.0), Error);
}

TEST_CASE("ADMM config validation") {
  AdmmConfig c;
  c.rho0 = 0;
  CHECK_THROWS_AS(CheckConfig(c), Error);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_AS(CheckConfig(c), Error);
  c = {};
  c.eps_primal = -1;
  CHECK_THROWS_AS(CheckConfig(c), Error);
  c = {};
  c.relaxation = 0;
  CHECK_THROWS_AS(CheckConfig(c), Error);
  CHECK_NOTHROW(CheckConfig(AdmmConfig{}));
}

}  // namespace
}  // namespace shapefit
