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

#include "shapefit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "shapefit/metrics.hpp"

namespace shapefit {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Rescales the internal state into a report; `scale` divides locations and
// residuals alike.
SolveReport MakeReport(const ProblemInstance& inst, const RunOutcome& run,
                       double scale, double objective, double seconds) {
  SolveReport report{PointCloud(run.state.T / scale)};
  report.iterations = run.state.iter;
  report.final_primal_residual = run.state.primal_residual / scale;
  report.final_dual_residual = run.state.dual_residual / scale;
  report.objective = objective;
  report.wall_seconds = seconds;
  report.converged = run.converged;
  if (inst.truth) report.rfe = Rfe(*inst.truth, report.locations);
  return report;
}

}  // namespace

std::string_view AlgorithmName(Algorithm algo) {
  switch (algo) {
    case Algorithm::kShapeFit:
      return "shapefit";
    case Algorithm::kShapeKick:
      return "shapekick";
    case Algorithm::kLud:
      return "lud";
  }
  return "unknown";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a :
       {Algorithm::kShapeFit, Algorithm::kShapeKick, Algorithm::kLud}) {
    if (AlgorithmName(a) == name) return a;
  }
  return std::nullopt;
}

void CheckConfig(const KickConfig& cfg) {
  if (!(cfg.rho0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho0 must be positive");
  }
  // A factor of exactly 1 is accepted: it reduces to plain ADMM.
  if (!(cfg.kick_factor >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kick factor must be >= 1");
  }
  if (cfg.stagnation_window <= 0 || cfg.max_kicks < 0 ||
      cfg.phase_max_iters <= 0 || cfg.final_phase_max_iters <= 0 || !(cfg.stagnation_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kick schedule counts and tolerances must be positive");
  }
}

double ShapeFitObjective(const DirectionGraph& graph, const Matrix& points) {
  double total = 0.0;
  for (int k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edges()[k];
    const Eigen::RowVectorXd x = points.row(e.i) - points.row(e.j);
    const auto v = graph.direction(k);
    total += (x - x.dot(v) * v).norm();
  }
  return total;
}

double LudObjective(const DirectionGraph& graph, const Matrix& points) {
  double total = 0.0;
  for (int k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edges()[k];
    const Eigen::RowVectorXd x = points.row(e.i) - points.row(e.j);
    const auto v = graph.direction(k);
    total += (x - std::max(1.0, x.dot(v)) * v).norm();
  }
  return total;
}

void LudProx::Apply(const DirectionGraph& graph, const Matrix& z, double rho,
                    Matrix& y) {
  const double threshold = 1.0 / rho;
  const Eigen::Index d = z.cols();
  y.resize(z.rows(), d);
  scales_.resize(static_cast<std::size_t>(z.rows()));
  const double* zp = z.data();
  const double* vp = graph.directions().data();
  double* yp = y.data();
  for (Eigen::Index k = 0; k < z.rows(); ++k, zp += d, vp += d, yp += d) {
    double a = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) a += zp[c] * vp[c];
    const double delta = std::max(1.0, a);
    double r2 = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double w = zp[c] - delta * vp[c];
      r2 += w * w;
    }
    const double r = std::sqrt(r2);
    const double keep = r > threshold ? 1.0 - threshold / r : 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      yp[c] = delta * vp[c] + keep * (zp[c] - delta * vp[c]);
    }
    scales_[static_cast<std::size_t>(k)] = delta;
  }
}

double ShapeFitInternalScale(const DirectionGraph& graph) {
  return static_cast<double>(std::max(1, graph.num_edges()));
}

SolveReport SolveShapeFit(const ProblemInstance& inst, const AdmmConfig& cfg,
                          const IterationObserver& observer) {
  RequireSolvable(inst);
  CheckConfig(cfg);
  const auto start = Clock::now();
  const DirectionGraph& g = inst.graph;
  const double scale = ShapeFitInternalScale(g);
  const AdmmEngine engine(g, GaugeMode::kTranslationAndScale, scale);
  ShapeFitProx prox;
  const RunOutcome run = RunAdmm(engine, prox, cfg, observer);
  const double seconds = SecondsSince(start);
  return MakeReport(inst, run, scale,
                    ShapeFitObjective(g, run.state.T / scale), seconds);
}

namespace {

AdmmConfig PhasedAdmmConfig(const KickConfig& cfg) {
  AdmmConfig admm;
  admm.rho0 = cfg.rho0;
  admm.max_iters = cfg.max_kicks * cfg.phase_max_iters + cfg.final_phase_max_iters;
  admm.eps_primal = cfg.eps_primal;
  admm.eps_dual = cfg.eps_dual;
  return admm;
}

// Runs ADMM under the kicking schedule of `cfg`.
RunOutcome RunKicked(const AdmmEngine& engine, EdgeProx& prox,
                     const KickConfig& cfg, const IterationObserver& observer) {
  int kicks = 0;
  int phase_iters = 0;
  int calm_streak = 0;
  const IterationObserver schedule = [&](SolverState& s) {
    if (observer && observer(s) == Control::kStop) return Control::kStop;
    ++phase_iters;
    calm_streak = s.y_relative_change < cfg.stagnation_tol ? calm_streak + 1 : 0;
    if (kicks == cfg.max_kicks) {
      // Last phase: no further kicks, run to tolerance or the phase cap.
      return phase_iters >= cfg.final_phase_max_iters ? Control::kStop
                                                      : Control::kContinue;
    }
    if (calm_streak >= cfg.stagnation_window ||
        phase_iters >= cfg.phase_max_iters) {
      ++kicks;
      RescalePenalty(s, s.rho * cfg.kick_factor);
      phase_iters = 0;
      calm_streak = 0;
    }
    return Control::kContinue;
  };
  return RunAdmm(engine, prox, PhasedAdmmConfig(cfg), schedule);
}

// min over c >= 0 of LudObjective(c * t). The map is convex in c, so a
// doubling bracket followed by golden-section search finds the minimizer.
double BestLudScale(const DirectionGraph& graph, const Matrix& t) {
  const auto f = [&](double c) { return LudObjective(graph, c * t); };
  double hi = 1.0;
  while (f(2.0 * hi) < f(hi) && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  hi *= 2.0;
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo);
  double b = lo + kInvPhi * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = f(b);
    }
  }
  const double best = 0.5 * (lo + hi);
  // Never report a worse point than the iterate itself.
  return f(best) < f(1.0) ? best : 1.0;
}

}  // namespace

KickConfig LudDefaultSchedule() {
  KickConfig cfg;
  cfg.max_kicks = 3;
  cfg.final_phase_max_iters = 20000;
  return cfg;
}

SolveReport SolveShapeKick(const ProblemInstance& inst, const KickConfig& cfg,
                           const IterationObserver& observer) {
  RequireSolvable(inst);
  CheckConfig(cfg);
  const auto start = Clock::now();
  const DirectionGraph& g = inst.graph;
  const double scale = ShapeFitInternalScale(g);
  const AdmmEngine engine(g, GaugeMode::kTranslationAndScale, scale);
  ShapeFitProx prox;
  const RunOutcome run = RunKicked(engine, prox, cfg, observer);
  const double seconds = SecondsSince(start);
  return MakeReport(inst, run, scale,
                    ShapeFitObjective(g, run.state.T / scale), seconds);
}

SolveReport SolveLud(const ProblemInstance& inst, const KickConfig& cfg,
                     const IterationObserver& observer) {
  RequireSolvable(inst);
  CheckConfig(cfg);
  const auto start = Clock::now();
  const DirectionGraph& g = inst.graph;
  const AdmmEngine engine(g, GaugeMode::kTranslation, 1.0);
  LudProx prox;
  const RunOutcome run = RunKicked(engine, prox, cfg, observer);
  // Along the ray {c T} the objective is one-dimensional; ADMM at a large
  // penalty settles the shape long before this scale.
  const Matrix& t = run.state.T;
  const double objective = LudObjective(g, BestLudScale(g, t) * t);
  const double seconds = SecondsSince(start);

  // Express the native-scale solution in the ShapeFit gauge.
  double projection = 0.0;
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    projection += (t.row(e.i) - t.row(e.j)).dot(g.direction(k));
  }
  if (!(projection > 0.0)) {
    throw Error(ErrorCode::kSolver,
                "LUD solution has no positive projection onto the directions");
  }
  return MakeReport(inst, run, projection, objective, seconds);
}

SolveReport Solve(const ProblemInstance& inst, const SolveOptions& options) {
  switch (options.algo) {
    case Algorithm::kShapeFit:
      return SolveShapeFit(inst, options.admm);
    case Algorithm::kShapeKick:
      return SolveShapeKick(inst, options.kick);
    case Algorithm::kLud:
      return SolveLud(inst, options.lud);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
}

}  // namespace shapefit
