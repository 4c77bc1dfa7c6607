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

#include "shapefit/metrics.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "shapefit/io.hpp"

namespace shapefit {
namespace {

Matrix CenteredUnit(const PointCloud& cloud, const char* which) {
  Matrix c = cloud.points();
  c.rowwise() -= c.colwise().mean();
  const double norm = c.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("RFE: ") + which + " cloud has collapsed points");
  }
  return c / norm;
}

}  // namespace

double Rfe(const PointCloud& truth, const PointCloud& recovered) {
  if (truth.size() != recovered.size() ||
      truth.dimension() != recovered.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "RFE: clouds differ in shape");
  }
  return (CenteredUnit(truth, "truth") - CenteredUnit(recovered, "recovered"))
      .norm();
}

TrialSummary MakeTrial(std::string algo, int n, const GenParams& gen,
                       double rfe, int iterations, double wall_seconds) {
  TrialSummary t;
  t.algo = std::move(algo);
  t.n = n;
  t.gen = gen;
  t.rfe = rfe;
  t.exact = rfe < kExactRecoveryThreshold;
  t.iterations = iterations;
  t.wall_seconds = wall_seconds;
  return t;
}

TrialAggregate Summarize(std::span<const TrialSummary> trials) {
  if (trials.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot summarize zero trials");
  }
  TrialAggregate agg;
  agg.trials = static_cast<int>(trials.size());
  std::vector<double> rfes;
  rfes.reserve(trials.size());
  int exact = 0;
  for (const TrialSummary& t : trials) {
    agg.mean_rfe += t.rfe;
    agg.mean_seconds += t.wall_seconds;
    exact += t.exact ? 1 : 0;
    rfes.push_back(t.rfe);
  }
  agg.mean_rfe /= agg.trials;
  agg.mean_seconds /= agg.trials;
  agg.exact_fraction = static_cast<double>(exact) / agg.trials;

  std::sort(rfes.begin(), rfes.end());
  const std::size_t mid = rfes.size() / 2;
  agg.median_rfe = rfes.size() % 2 == 1 ? rfes[mid]
                                        : 0.5 * (rfes[mid - 1] + rfes[mid]);
  return agg;
}

std::string TrialCsvHeader() {
  return "algo,n,p,q,sigma,seed,rfe,exact,iters,seconds";
}

std::string TrialCsvRow(const TrialSummary& t) {
  return t.algo + "," + std::to_string(t.n) + "," + FormatReal(t.gen.p) + "," +
         FormatReal(t.gen.q) + "," + FormatReal(t.gen.sigma) + "," +
         std::to_string(t.gen.seed) + "," + FormatReal(t.rfe) + "," +
         (t.exact ? "1" : "0") + "," + std::to_string(t.iterations) + "," +
         FormatReal(t.wall_seconds);
}

}  // namespace shapefit
