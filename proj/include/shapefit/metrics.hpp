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

#ifndef SHAPEFIT_METRICS_HPP_
#define SHAPEFIT_METRICS_HPP_

#include <span>
#include <string>

#include "shapefit/model.hpp"

namespace shapefit {

// Recovery counts as exact below this relative Frobenius error.
inline constexpr double kExactRecoveryThreshold = 1e-9;

// Relative Frobenius error between two clouds after removing translation
// (centroid subtraction) and scale (Frobenius normalization). In [0, 2].
double Rfe(const PointCloud& truth, const PointCloud& recovered);

struct TrialSummary {
  std::string algo;
  int n = 0;
  GenParams gen;
  double rfe = 0.0;
  bool exact = false;  // rfe < kExactRecoveryThreshold
  int iterations = 0;
  double wall_seconds = 0.0;
};

TrialSummary MakeTrial(std::string algo, int n, const GenParams& gen,
                       double rfe, int iterations, double wall_seconds);

struct TrialAggregate {
  int trials = 0;
  double mean_rfe = 0.0;
  double median_rfe = 0.0;
  double exact_fraction = 0.0;
  double mean_seconds = 0.0;
};

// Throws on an empty input.
TrialAggregate Summarize(std::span<const TrialSummary> trials);

// Per-trial CSV log: algo,n,p,q,sigma,seed,rfe,exact,iters,seconds
std::string TrialCsvHeader();
std::string TrialCsvRow(const TrialSummary& t);

}  // namespace shapefit

#endif  // SHAPEFIT_METRICS_HPP_
