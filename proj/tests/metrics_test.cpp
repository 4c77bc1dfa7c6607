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
#include <vector>

#include "doctest.h"
#include "shapefit/metrics.hpp"
#include "test_util.hpp"

namespace shapefit {
namespace {

TEST_CASE("RFE of identical clouds is zero") {
  Rng rng(1);
  const PointCloud c(testing::RandomMatrix(rng, 10, 3));
  CHECK(Rfe(c, c) == 0.0);
}

TEST_CASE("property: RFE ignores translation and positive scaling") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c(testing::RandomMatrix(rng, 8, 3));
    const double a = std::pow(10.0, 4 * rng.Uniform() - 2);
    const Eigen::RowVectorXd w = testing::RandomMatrix(rng, 1, 3).row(0) * 10;
    CHECK(Rfe(c, ApplyGauge(c, a, w)) <= 1e-12);
  }
}

TEST_CASE("a reflected cloud has RFE 2") {
  Matrix t(2, 3);
  t << 0, 0, 0, 1, 0, 0;
  CHECK(Rfe(PointCloud(t), PointCloud(-t)) == doctest::Approx(2.0));
}

TEST_CASE("property: RFE is symmetric and within [0, 2]") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud a(testing::RandomMatrix(rng, 6, 2));
    const PointCloud b(testing::RandomMatrix(rng, 6, 2));
    const double ab = Rfe(a, b);
    CHECK(ab == doctest::Approx(Rfe(b, a)).epsilon(1e-14));
    CHECK(ab >= 0.0);
    CHECK(ab <= 2.0 + 1e-15);
  }
}

TEST_CASE("RFE rejects mismatched or collapsed clouds") {
  CHECK_THROWS_AS(Rfe(PointCloud(Matrix::Ones(3, 3)), PointCloud(Matrix::Ones(4, 3))),
                  Error);
  Matrix t(2, 3);
  t << 0, 0, 0, 1, 0, 0;
  CHECK_THROWS_AS(Rfe(PointCloud(t), PointCloud(Matrix::Ones(2, 3))), Error);
}

TEST_CASE("summaries of trial lists") {
  const GenParams gen;
  std::vector<TrialSummary> trials = {
      MakeTrial("shapefit", 10, gen, 1e-12, 5, 1.0),
      MakeTrial("shapefit", 10, gen, 0.5, 7, 2.0),
      MakeTrial("shapefit", 10, gen, 1e-10, 9, 3.0),
  };
  CHECK(trials[0].exact);
  CHECK(!trials[1].exact);
  TrialAggregate agg = Summarize(trials);
  CHECK(agg.trials == 3);
  CHECK(agg.exact_fraction == doctest::Approx(2.0 / 3));
  CHECK(agg.median_rfe == 1e-10);
  CHECK(agg.mean_rfe == doctest::Approx((1e-12 + 0.5 + 1e-10) / 3));
  CHECK(agg.mean_seconds == doctest::Approx(2.0));

  trials.push_back(MakeTrial("shapefit", 10, gen, 1.0, 1, 0.0));
  agg = Summarize(trials);
  CHECK(agg.median_rfe == doctest::Approx(0.5 * (1e-10 + 0.5)));
  CHECK_THROWS_AS(Summarize({}), Error);
}

TEST_CASE("exactness threshold is strict") {
  CHECK(!MakeTrial("lud", 2, {}, kExactRecoveryThreshold, 0, 0).exact);
  CHECK(MakeTrial("lud", 2, {}, 0.99e-9, 0, 0).exact);
}

TEST_CASE("trial CSV layout") {
  CHECK(TrialCsvHeader() == "algo,n,p,q,sigma,seed,rfe,exact,iters,seconds");
  GenParams gen;
  gen.p = 0.5;
  gen.q = 0.25;
  gen.sigma = 0;
  gen.seed = 77;
  CHECK(TrialCsvRow(MakeTrial("lud", 20, gen, 0.5, 3, 0.125)) ==
        "lud,20,0.5,0.25,0,77,0.5,0,3,0.125");
}

}  // namespace
}  // namespace shapefit
