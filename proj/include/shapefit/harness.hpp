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

#ifndef SHAPEFIT_HARNESS_HPP_
#define SHAPEFIT_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "shapefit/metrics.hpp"
#include "shapefit/solvers.hpp"

namespace shapefit {

struct SweepSpec {
  int n = 200;
  int d = 3;
  std::vector<double> p_grid;
  std::vector<double> q_grid;
  double sigma = 0.0;
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algos = {Algorithm::kShapeFit};
  SolveOptions solver;  // options.algo is ignored; `algos` decides
};

void CheckSpec(const SweepSpec& spec);

// Seed of one trial: base_seed XOR Hash64 of "<algo>/<i>/<j>/<trial>", where
// i and j index the two grid axes of the experiment (p and q for sweeps,
// sigma and 0 for noise curves). A single cell can be re-run on its own.
std::uint64_t TrialSeed(std::uint64_t base_seed, Algorithm algo, int i, int j,
                        int trial);

struct CellResult {
  Algorithm algo = Algorithm::kShapeFit;
  int n = 0;
  double p = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  // All fields NaN when any trial failed; `error` then holds the first
  // failure in trial order.
  TrialAggregate aggregate;
  std::string error;
  // Completed trials in trial order.
  std::vector<TrialSummary> trials;
};

// Runs every (algo, p, q) cell with `workers` threads (0 = hardware
// concurrency). The result is sorted by algorithm name, then p, then q, and
// does not depend on the worker count except for timing fields.
std::vector<CellResult> RunSweep(const SweepSpec& spec, int workers = 1);

std::string SweepCsvHeader();  // algo,n,p,q,sigma,mean_rfe,...,error
std::string SweepCsvRow(const CellResult& cell);
void WriteSweepCsv(std::ostream& out, const std::vector<CellResult>& cells);

// One TrialCsvRow per completed trial, cells in result order.
void WriteTrialLog(std::ostream& out, const std::vector<CellResult>& cells);

struct NoiseCurveSpec {
  int n = 200;
  int d = 3;
  double p = 0.5;
  double q = 0.3;
  std::vector<double> sigmas;
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algos = {Algorithm::kShapeFit, Algorithm::kLud};
  SolveOptions solver;
};

void CheckSpec(const NoiseCurveSpec& spec);

// `sigmas` spaced geometrically from lo to hi, both included.
std::vector<double> LogSpaced(double lo, double hi, int count);

// Cells sorted by algorithm name, then sigma.
std::vector<CellResult> RunNoiseCurve(const NoiseCurveSpec& spec,
                                      int workers = 1);

std::string NoiseCsvHeader();  // algo,sigma,mean_rfe,error
std::string NoiseCsvRow(const CellResult& cell);
void WriteNoiseCsv(std::ostream& out, const std::vector<CellResult>& cells);

// key=value settings shared by the CLI and the C API. Solver keys:
//   rho0, max_iters, eps_primal, eps_dual, relaxation           (ADMM)
//   kick.rho0, kick.factor, kick.window, kick.tol, kick.max_kicks,
//   kick.phase_iters, kick.final_iters                           (ShapeKick)
//   lud.<same as kick>                                           (LUD)
// Throws kInvalidArgument on an unknown key or a malformed value.
void ApplySolverSetting(SolveOptions& options, std::string_view key,
                        std::string_view value);

// Comma-separated lists of reals / algorithm names.
std::vector<double> ParseRealList(std::string_view text);
std::vector<Algorithm> ParseAlgorithmList(std::string_view text);

}  // namespace shapefit

#endif  // SHAPEFIT_HARNESS_HPP_
