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

#include "shapefit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <tuple>

#include "shapefit/io.hpp"
#include "shapefit/rng.hpp"
#include "shapefit/synth.hpp"

namespace shapefit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CellPlan {
  Algorithm algo;
  int n;
  int d;
  double p;
  double q;
  double sigma;
  int axis_i;
  int axis_j;
};

struct TrialOutcome {
  bool ok = false;
  TrialSummary summary;
  std::string error;
};

TrialOutcome RunTrial(const CellPlan& cell, int trial, std::uint64_t base_seed,
                      const SolveOptions& solver) {
  TrialOutcome out;
  GenConfig gen;
  gen.n = cell.n;
  gen.d = cell.d;
  gen.p = cell.p;
  gen.q = cell.q;
  gen.sigma = cell.sigma;
  gen.seed = TrialSeed(base_seed, cell.algo, cell.axis_i, cell.axis_j, trial);
  try {
    const ProblemInstance inst = Generate(gen);
    SolveOptions options = solver;
    options.algo = cell.algo;
    const SolveReport report = Solve(inst, options);
    out.summary = MakeTrial(std::string(AlgorithmName(cell.algo)), cell.n,
                            *inst.gen_params, report.rfe.value_or(kNaN),
                            report.iterations, report.wall_seconds);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = "trial " + std::to_string(trial) + " (seed " +
                std::to_string(gen.seed) + "): " + e.what();
  }
  return out;
}

int ResolveWorkers(int workers) {
  if (workers < 0) {
    throw Error(ErrorCode::kInvalidArgument, "worker count must be >= 0");
  }
  if (workers == 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, workers);
}

// Every (cell, trial) pair is one task, handed out through an atomic
// counter. Results land in fixed slots, so aggregation never sees the
// execution order.
std::vector<CellResult> RunCells(std::vector<CellPlan> plans, int trials,
                                 std::uint64_t base_seed,
                                 const SolveOptions& solver, int workers) {
  std::stable_sort(plans.begin(), plans.end(),
                   [](const CellPlan& a, const CellPlan& b) {
                     return std::make_tuple(AlgorithmName(a.algo), a.p, a.q,
                                            a.sigma) <
                            std::make_tuple(AlgorithmName(b.algo), b.p, b.q,
                                            b.sigma);
                   });
  const std::size_t total = plans.size() * static_cast<std::size_t>(trials);
  std::vector<TrialOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t cell = task / static_cast<std::size_t>(trials);
      const int trial = static_cast<int>(task % static_cast<std::size_t>(trials));
      outcomes[task] = RunTrial(plans[cell], trial, base_seed, solver);
    }
  };
  const int width =
      static_cast<int>(std::min<std::size_t>(ResolveWorkers(workers), total));
  std::vector<std::thread> pool;
  for (int w = 1; w < width; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  std::vector<CellResult> cells;
  cells.reserve(plans.size());
  for (std::size_t c = 0; c < plans.size(); ++c) {
    CellResult cell;
    cell.algo = plans[c].algo;
    cell.n = plans[c].n;
    cell.p = plans[c].p;
    cell.q = plans[c].q;
    cell.sigma = plans[c].sigma;
    for (int t = 0; t < trials; ++t) {
      TrialOutcome& o = outcomes[c * static_cast<std::size_t>(trials) + t];
      if (o.ok) {
        cell.trials.push_back(std::move(o.summary));
      } else if (cell.error.empty()) {
        cell.error = std::move(o.error);
      }
    }
    if (cell.error.empty()) {
      cell.aggregate = Summarize(cell.trials);
    } else {
      cell.aggregate.trials = trials;
      cell.aggregate.mean_rfe = kNaN;
      cell.aggregate.median_rfe = kNaN;
      cell.aggregate.exact_fraction = kNaN;
      cell.aggregate.mean_seconds = kNaN;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void CheckCommon(int n, int d, int trials, const std::vector<Algorithm>& algos) {
  if (n < 2 || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need n >= 2 and d >= 1");
  }
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  }
  if (algos.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "algorithm list is empty");
  }
}

void CheckProbability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must lie in [0, 1]");
  }
}

// CSV fields never contain quotes or separators in the other columns, so only
// the free-text error needs care.
std::string CsvText(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

double ParseReal(std::string_view text, std::string_view key) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

int ParseInt(std::string_view text, std::string_view key) {
  int value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitList(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t comma = text.find(',');
    parts.push_back(Trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

bool ApplyKickSetting(KickConfig& cfg, std::string_view key,
                      std::string_view value) {
  if (key == "rho0") cfg.rho0 = ParseReal(value, key);
  else if (key == "factor") cfg.kick_factor = ParseReal(value, key);
  else if (key == "window") cfg.stagnation_window = ParseInt(value, key);
  else if (key == "tol") cfg.stagnation_tol = ParseReal(value, key);
  else if (key == "max_kicks") cfg.max_kicks = ParseInt(value, key);
  else if (key == "phase_iters") cfg.phase_max_iters = ParseInt(value, key);
  else if (key == "final_iters") cfg.final_phase_max_iters = ParseInt(value, key);
  else if (key == "eps_primal") cfg.eps_primal = ParseReal(value, key);
  else if (key == "eps_dual") cfg.eps_dual = ParseReal(value, key);
  else return false;
  return true;
}

}  // namespace

std::uint64_t TrialSeed(std::uint64_t base_seed, Algorithm algo, int i, int j,
                        int trial) {
  const std::string key = std::string(AlgorithmName(algo)) + "/" +
                          std::to_string(i) + "/" + std::to_string(j) + "/" +
                          std::to_string(trial);
  return base_seed ^ Hash64(key);
}

void CheckSpec(const SweepSpec& spec) {
  CheckCommon(spec.n, spec.d, spec.trials, spec.algos);
  if (spec.p_grid.empty() || spec.q_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "p and q grids must be nonempty");
  }
  for (double p : spec.p_grid) CheckProbability(p, "p");
  for (double q : spec.q_grid) CheckProbability(q, "q");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be finite and >= 0");
  }
}

std::vector<CellResult> RunSweep(const SweepSpec& spec, int workers) {
  CheckSpec(spec);
  std::vector<CellPlan> plans;
  for (Algorithm algo : spec.algos) {
    for (std::size_t i = 0; i < spec.p_grid.size(); ++i) {
      for (std::size_t j = 0; j < spec.q_grid.size(); ++j) {
        plans.push_back({algo, spec.n, spec.d, spec.p_grid[i], spec.q_grid[j],
                         spec.sigma, static_cast<int>(i),
                         static_cast<int>(j)});
      }
    }
  }
  return RunCells(std::move(plans), spec.trials, spec.base_seed, spec.solver,
                  workers);
}

std::string SweepCsvHeader() {
  return "algo,n,p,q,sigma,mean_rfe,median_rfe,exact_frac,mean_seconds,error";
}

std::string SweepCsvRow(const CellResult& cell) {
  const TrialAggregate& a = cell.aggregate;
  return std::string(AlgorithmName(cell.algo)) + "," + std::to_string(cell.n) +
         "," + FormatReal(cell.p) + "," + FormatReal(cell.q) + "," +
         FormatReal(cell.sigma) + "," + FormatReal(a.mean_rfe) + "," +
         FormatReal(a.median_rfe) + "," + FormatReal(a.exact_fraction) + "," +
         FormatReal(a.mean_seconds) + "," + CsvText(cell.error);
}

void WriteSweepCsv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << SweepCsvHeader() << '\n';
  for (const CellResult& c : cells) out << SweepCsvRow(c) << '\n';
}

void WriteTrialLog(std::ostream& out, const std::vector<CellResult>& cells) {
  out << TrialCsvHeader() << '\n';
  for (const CellResult& c : cells) {
    for (const TrialSummary& t : c.trials) out << TrialCsvRow(t) << '\n';
  }
}

void CheckSpec(const NoiseCurveSpec& spec) {
  CheckCommon(spec.n, spec.d, spec.trials, spec.algos);
  CheckProbability(spec.p, "p");
  CheckProbability(spec.q, "q");
  if (spec.sigmas.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sigma grid must be nonempty");
  }
  for (double s : spec.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sigma values must be finite and >= 0");
    }
  }
}

std::vector<double> LogSpaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count == 1 && hi != lo)) {
    throw Error(ErrorCode::kInvalidArgument,
                "log spacing needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = count > 1 ? std::log(hi / lo) / (count - 1) : 0.0;
  for (int k = 0; k < count; ++k) out[k] = lo * std::exp(step * k);
  out.back() = hi;
  return out;
}

std::vector<CellResult> RunNoiseCurve(const NoiseCurveSpec& spec,
                                      int workers) {
  CheckSpec(spec);
  std::vector<CellPlan> plans;
  for (Algorithm algo : spec.algos) {
    for (std::size_t i = 0; i < spec.sigmas.size(); ++i) {
      plans.push_back({algo, spec.n, spec.d, spec.p, spec.q, spec.sigmas[i],
                       static_cast<int>(i), 0});
    }
  }
  return RunCells(std::move(plans), spec.trials, spec.base_seed, spec.solver,
                  workers);
}

std::string NoiseCsvHeader() { return "algo,sigma,mean_rfe,error"; }

std::string NoiseCsvRow(const CellResult& cell) {
  return std::string(AlgorithmName(cell.algo)) + "," + FormatReal(cell.sigma) +
         "," + FormatReal(cell.aggregate.mean_rfe) + "," + CsvText(cell.error);
}

void WriteNoiseCsv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << NoiseCsvHeader() << '\n';
  for (const CellResult& c : cells) out << NoiseCsvRow(c) << '\n';
}

void ApplySolverSetting(SolveOptions& options, std::string_view key,
                        std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  bool known = true;
  if (key == "rho0") options.admm.rho0 = ParseReal(value, key);
  else if (key == "max_iters") options.admm.max_iters = ParseInt(value, key);
  else if (key == "eps_primal") options.admm.eps_primal = ParseReal(value, key);
  else if (key == "eps_dual") options.admm.eps_dual = ParseReal(value, key);
  else if (key == "relaxation") options.admm.relaxation = ParseReal(value, key);
  else if (key.starts_with("kick.")) known = ApplyKickSetting(options.kick, key.substr(5), value);
  else if (key.starts_with("lud.")) known = ApplyKickSetting(options.lud, key.substr(4), value);
  else known = false;
  if (!known) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown solver setting '" + std::string(key) + "'");
  }
}

std::vector<double> ParseRealList(std::string_view text) {
  std::vector<double> out;
  for (std::string_view part : SplitList(text)) {
    out.push_back(ParseReal(part, "list"));
  }
  return out;
}

std::vector<Algorithm> ParseAlgorithmList(std::string_view text) {
  std::vector<Algorithm> out;
  for (std::string_view part : SplitList(text)) {
    const std::optional<Algorithm> algo = ParseAlgorithm(part);
    if (!algo) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown algorithm '" + std::string(part) + "'");
    }
    out.push_back(*algo);
  }
  return out;
}

}  // namespace shapefit
