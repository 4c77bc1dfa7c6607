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

#include "doctest.h"
#include "shapefit/model.hpp"
#include "test_util.hpp"

namespace shapefit {
namespace {

using testing::CompleteEdges;
using testing::ExactGraph;
using testing::Wrap;

Matrix Triangle() {
  Matrix t(3, 3);
  t << 0, 0, 0, 1, 0, 0, 0, 2, 1;
  return t;
}

TEST_CASE("complete triangle with exact directions is valid") {
  CHECK(ValidateInstance(Wrap(ExactGraph(Triangle(), CompleteEdges(3))))
            .empty());
}

TEST_CASE("a direction of norm 0.5 on edge 0 is reported for edge 0 only") {
  DirectionGraph exact = ExactGraph(Triangle(), CompleteEdges(3));
  Matrix dirs = exact.directions();
  dirs.row(0) *= 0.5;
  const auto v = ValidateInstance(Wrap(DirectionGraph(3, exact.edges(), dirs)));
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kNonUnitDirection);
  CHECK(v[0].index == 0);
}

TEST_CASE("two components give exactly one connectivity violation") {
  Matrix t(4, 3);
  t << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const auto v =
      ValidateInstance(Wrap(ExactGraph(t, {{0, 1}, {2, 3}})));
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kDisconnected);
  CHECK_THROWS_AS(RequireSolvable(Wrap(ExactGraph(t, {{0, 1}, {2, 3}}))),
                  Error);
}

TEST_CASE("structural violations are all reported") {
  Matrix dirs(3, 3);
  dirs << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  // Self-loop, non-canonical order and a duplicate edge.
  const DirectionGraph g(3, {{1, 1}, {2, 0}, {2, 0}}, dirs);
  const auto v = ValidateInstance(Wrap(g));
  bool self = false, order = false, dup = false;
  for (const auto& x : v) {
    self |= x.kind == ViolationKind::kSelfLoop;
    order |= x.kind == ViolationKind::kNotCanonical;
    dup |= x.kind == ViolationKind::kDuplicateEdge;
  }
  CHECK(self);
  CHECK(order);
  CHECK(dup);
}

TEST_CASE("bipartite partition must be crossed by every edge") {
  const Matrix t = Triangle();
  DirectionGraph exact = ExactGraph(t, CompleteEdges(3));
  const DirectionGraph g(3, exact.edges(), exact.directions(),
                         std::vector<bool>{true, false, false});
  const auto v = ValidateInstance(Wrap(g));
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kPartitionNotCrossed);
  CHECK(v[0].index == 2);  // edge (1, 2) joins two structure vertices
}

TEST_CASE("truth shape and corrupted indices are checked") {
  ProblemInstance inst = Wrap(ExactGraph(Triangle(), CompleteEdges(3)));
  inst.truth = PointCloud(Matrix::Zero(4, 3));
  inst.corrupted_edges = std::vector<int>{0, 7};
  const auto v = ValidateInstance(inst);
  bool truth = false, bad = false;
  for (const auto& x : v) {
    truth |= x.kind == ViolationKind::kTruthMismatch;
    bad |= x.kind == ViolationKind::kCorruptedIndexOutOfRange;
  }
  CHECK(truth);
  CHECK(bad);
}

TEST_CASE("flipped observations are stored canonically with negated direction") {
  Matrix dirs(1, 3);
  dirs << 0, 1, 0;
  const DirectionGraph g =
      DirectionGraph::FromObservations(2, {{1, 0}}, dirs);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.direction(0)(1) == -1.0);
}

TEST_CASE("point cloud invariants") {
  CHECK_THROWS_AS(PointCloud(Matrix::Zero(1, 3)), Error);
  Matrix bad = Matrix::Zero(2, 3);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(PointCloud{bad}, Error);
}

TEST_CASE("apply_gauge examples") {
  Matrix two(2, 3);
  two << 0, 0, 0, 1, 0, 0;
  const PointCloud c(two);
  CHECK(ApplyGauge(c, 1.0, Eigen::RowVectorXd::Zero(3)).points() == two);

  const Eigen::RowVectorXd w = Eigen::RowVector3d(1, 0, 0);
  Matrix expect(2, 3);
  expect << 2, 0, 0, 4, 0, 0;
  CHECK(ApplyGauge(c, 2.0, w).points() == expect);

  CHECK_THROWS_AS(ApplyGauge(c, 0.0, w), Error);
  CHECK_THROWS_AS(ApplyGauge(c, -1.0, w), Error);
  CHECK_THROWS_AS(ApplyGauge(c, 1.0, Eigen::RowVectorXd::Zero(2)), Error);
}

TEST_CASE("property: gauge composition and direction invariance") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const PointCloud c(testing::RandomMatrix(rng, n, 3));
    const double a = 0.1 + 5 * rng.Uniform();
    const double b = 0.1 + 5 * rng.Uniform();
    const Eigen::RowVectorXd w = testing::RandomMatrix(rng, 1, 3).row(0);
    const Eigen::RowVectorXd u = testing::RandomMatrix(rng, 1, 3).row(0);

    const PointCloud twice = ApplyGauge(ApplyGauge(c, a, w), b, u);
    const PointCloud once = ApplyGauge(c, a * b, w + u / a);
    CHECK((twice.points() - once.points()).norm() <=
          1e-12 * (1 + once.points().norm()));

    const PointCloud g = ApplyGauge(c, a, w);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Eigen::RowVectorXd d0 = c.point(i) - c.point(j);
        const Eigen::RowVectorXd d1 = g.point(i) - g.point(j);
        CHECK((d0 / d0.norm() - d1 / d1.norm()).norm() <= 1e-14);
      }
    }
  }
}

TEST_CASE("gauge defect of a feasible cloud is zero") {
  const DirectionGraph g = ExactGraph(Triangle(), CompleteEdges(3));
  Matrix t = Triangle();
  t.rowwise() -= t.colwise().mean();
  double s = 0;
  for (int k = 0; k < g.num_edges(); ++k) {
    s += (t.row(g.edges()[k].i) - t.row(g.edges()[k].j)).dot(g.direction(k));
  }
  t /= s;
  const GaugeDefect d = MeasureGauge(g, t);
  CHECK(d.translation <= 1e-15);
  CHECK(d.scale <= 1e-15);
}

}  // namespace
}  // namespace shapefit
