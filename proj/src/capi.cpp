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

#include "shapefit/shapefit.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "shapefit/harness.hpp"
#include "shapefit/io.hpp"
#include "shapefit/metrics.hpp"
#include "shapefit/oracle.hpp"
#include "shapefit/solvers.hpp"
#include "shapefit/synth.hpp"

struct sf_instance {
  shapefit::ProblemInstance inst;
};

struct sf_options {
  shapefit::SolveOptions options;
};

struct sf_report {
  shapefit::SolveReport report;
};

struct sf_experiment {
  int n = 200;
  int d = 3;
  int trials = 10;
  std::uint64_t seed = 0;
  std::vector<double> p = {0.5};
  std::vector<double> q = {0.0};
  std::vector<double> sigma = {0.0};
  std::vector<shapefit::Algorithm> algos = {shapefit::Algorithm::kShapeFit};
  shapefit::SolveOptions solver;
};

namespace {

using shapefit::Error;
using shapefit::ErrorCode;

thread_local std::string g_last_error;

sf_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return SF_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDisconnected:
      return SF_ERR_DISCONNECTED;
    case ErrorCode::kGeneration:
      return SF_ERR_GENERATION;
    case ErrorCode::kIo:
      return SF_ERR_IO;
    case ErrorCode::kParse:
      return SF_ERR_PARSE;
    case ErrorCode::kSolver:
      return SF_ERR_SOLVER;
  }
  return SF_ERR_INTERNAL;
}

sf_status Fail(sf_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` and converts any exception into a status code. No exception
// crosses the C boundary.
template <typename Body>
sf_status Guard(Body&& body) {
  try {
    body();
    return SF_OK;
  } catch (const Error& e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SF_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(SF_ERR_INTERNAL, "unknown error");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int ParseCount(const char* value, const char* key) {
  const std::vector<double> v = shapefit::ParseRealList(value);
  if (v.size() != 1 || v[0] != static_cast<int>(v[0])) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("expected an integer for ") + key);
  }
  return static_cast<int>(v[0]);
}

std::uint64_t ParseSeed(const char* value) {
  std::string s(value);
  std::size_t used = 0;
  unsigned long long seed = 0;
  try {
    seed = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s[0] == '-') {
    throw Error(ErrorCode::kInvalidArgument, "seed must be an unsigned integer");
  }
  return seed;
}

double Single(const std::vector<double>& v, const char* key) {
  if (v.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("expected a single value for ") + key);
  }
  return v[0];
}

void EmitCsv(const std::vector<shapefit::CellResult>& cells, bool noise,
             char** csv, char** trial_log) {
  std::ostringstream table;
  if (noise) {
    shapefit::WriteNoiseCsv(table, cells);
  } else {
    shapefit::WriteSweepCsv(table, cells);
  }
  std::string log;
  if (trial_log) {
    std::ostringstream trials;
    shapefit::WriteTrialLog(trials, cells);
    log = trials.str();
  }
  char* table_out = CopyString(table.str());
  if (trial_log) {
    try {
      *trial_log = CopyString(log);
    } catch (...) {
      std::free(table_out);
      throw;
    }
  }
  *csv = table_out;
}

}  // namespace

extern "C" {

const char* sf_version(void) { return "1.0.0"; }

const char* sf_status_name(sf_status status) {
  switch (status) {
    case SF_OK:
      return "ok";
    case SF_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case SF_ERR_DISCONNECTED:
      return "disconnected graph";
    case SF_ERR_GENERATION:
      return "generation failed";
    case SF_ERR_IO:
      return "i/o error";
    case SF_ERR_PARSE:
      return "parse error";
    case SF_ERR_SOLVER:
      return "solver error";
    case SF_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* sf_last_error(void) { return g_last_error.c_str(); }

void sf_string_free(char* s) { std::free(s); }

sf_status sf_algorithm_parse(const char* name, sf_algorithm* out) {
  return Guard([&] {
    Require(name && out, "null argument");
    const auto algo = shapefit::ParseAlgorithm(name);
    if (!algo) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("unknown algorithm '") + name + "'");
    }
    *out = static_cast<sf_algorithm>(*algo);
  });
}

const char* sf_algorithm_name(sf_algorithm algo) {
  switch (algo) {
    case SF_ALGO_SHAPEFIT:
    case SF_ALGO_SHAPEKICK:
    case SF_ALGO_LUD:
      // The names are string literals, hence NUL-terminated.
      return shapefit::AlgorithmName(static_cast<shapefit::Algorithm>(algo))
          .data();
  }
  return "unknown";
}

void sf_gen_config_init(sf_gen_config* cfg) {
  if (!cfg) return;
  *cfg = sf_gen_config{};
  cfg->d = 3;
}

sf_status sf_generate(const sf_gen_config* cfg, sf_instance** out) {
  return Guard([&] {
    Require(cfg && out, "null argument");
    shapefit::GenConfig gen;
    gen.n = cfg->n;
    gen.p = cfg->p;
    gen.q = cfg->q;
    gen.sigma = cfg->sigma;
    gen.d = cfg->d;
    gen.seed = cfg->seed;
    if (cfg->num_cameras > 0 || cfg->num_structure > 0) {
      gen.bipartite = shapefit::BipartiteSpec{cfg->num_cameras,
                                              cfg->num_structure, cfg->p};
    }
    *out = new sf_instance{shapefit::Generate(gen)};
  });
}

sf_status sf_instance_load(const char* path, sf_instance** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new sf_instance{shapefit::LoadInstance(path)};
  });
}

sf_status sf_instance_save(const sf_instance* inst, const char* path) {
  return Guard([&] {
    Require(inst && path, "null argument");
    shapefit::SaveInstance(path, inst->inst);
  });
}

void sf_instance_free(sf_instance* inst) { delete inst; }

sf_status sf_instance_info_get(const sf_instance* inst, sf_instance_info* out) {
  return Guard([&] {
    Require(inst && out, "null argument");
    const shapefit::ProblemInstance& p = inst->inst;
    out->n = p.graph.num_vertices();
    out->m = p.graph.num_edges();
    out->d = p.graph.dimension();
    out->num_corrupted =
        p.corrupted_edges ? static_cast<int>(p.corrupted_edges->size()) : -1;
    out->has_truth = p.truth ? 1 : 0;
  });
}

sf_status sf_instance_validate(const sf_instance* inst, int* count,
                               char** messages) {
  return Guard([&] {
    Require(inst && count, "null argument");
    const auto violations = shapefit::ValidateInstance(inst->inst);
    if (messages) {
      std::string text;
      for (const auto& v : violations) text += v.message + "\n";
      *messages = CopyString(text);
    }
    *count = static_cast<int>(violations.size());
  });
}

sf_status sf_options_create(sf_options** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new sf_options{};
  });
}

void sf_options_free(sf_options* opts) { delete opts; }

sf_status sf_options_set_algorithm(sf_options* opts, sf_algorithm algo) {
  return Guard([&] {
    Require(opts, "null argument");
    Require(algo >= SF_ALGO_SHAPEFIT && algo <= SF_ALGO_LUD,
            "unknown algorithm");
    opts->options.algo = static_cast<shapefit::Algorithm>(algo);
  });
}

sf_status sf_options_set(sf_options* opts, const char* key, const char* value) {
  return Guard([&] {
    Require(opts && key && value, "null argument");
    if (std::string_view(key) == "algo") {
      const auto algos = shapefit::ParseAlgorithmList(value);
      Require(algos.size() == 1, "expected a single algorithm");
      opts->options.algo = algos[0];
      return;
    }
    shapefit::ApplySolverSetting(opts->options, key, value);
  });
}

sf_status sf_solve(const sf_instance* inst, const sf_options* opts,
                   sf_report** out) {
  return Guard([&] {
    Require(inst && out, "null argument");
    const shapefit::SolveOptions options =
        opts ? opts->options : shapefit::SolveOptions{};
    *out = new sf_report{shapefit::Solve(inst->inst, options)};
  });
}

sf_status sf_oracle(const sf_instance* inst, sf_program program,
                    sf_report** out) {
  return Guard([&] {
    Require(inst && out, "null argument");
    Require(program == SF_PROGRAM_SHAPEFIT || program == SF_PROGRAM_LUD,
            "unknown program");
    const auto start = std::chrono::steady_clock::now();
    const shapefit::OracleResult r = shapefit::OracleSolve(
        program == SF_PROGRAM_LUD ? shapefit::OracleProgram::kLud
                                  : shapefit::OracleProgram::kShapeFit,
        inst->inst);
    shapefit::SolveReport report{r.locations};
    report.iterations = r.iterations;
    report.objective = r.objective;
    report.converged = true;
    report.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    if (inst->inst.truth) {
      report.rfe = shapefit::Rfe(*inst->inst.truth, report.locations);
    }
    *out = new sf_report{std::move(report)};
  });
}

void sf_report_free(sf_report* report) { delete report; }

int sf_report_iterations(const sf_report* report) {
  return report ? report->report.iterations : 0;
}

double sf_report_objective(const sf_report* report) {
  return report ? report->report.objective : 0.0;
}

double sf_report_seconds(const sf_report* report) {
  return report ? report->report.wall_seconds : 0.0;
}

int sf_report_converged(const sf_report* report) {
  return report && report->report.converged ? 1 : 0;
}

double sf_report_primal_residual(const sf_report* report) {
  return report ? report->report.final_primal_residual : 0.0;
}

double sf_report_dual_residual(const sf_report* report) {
  return report ? report->report.final_dual_residual : 0.0;
}

int sf_report_rfe(const sf_report* report, double* rfe) {
  if (!report || !report->report.rfe) return 0;
  if (rfe) *rfe = *report->report.rfe;
  return 1;
}

sf_status sf_report_locations(const sf_report* report, double* buf,
                              size_t len, int* n, int* d) {
  return Guard([&] {
    Require(report, "null argument");
    const shapefit::Matrix& t = report->report.locations.points();
    if (n) *n = static_cast<int>(t.rows());
    if (d) *d = static_cast<int>(t.cols());
    if (!buf) return;
    Require(len >= static_cast<size_t>(t.size()), "buffer too small");
    std::memcpy(buf, t.data(), sizeof(double) * static_cast<size_t>(t.size()));
  });
}

sf_status sf_report_save(const sf_report* report, const char* path) {
  return Guard([&] {
    Require(report && path, "null argument");
    shapefit::SaveResult(path, report->report);
  });
}

sf_status sf_experiment_create(sf_experiment** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new sf_experiment{};
  });
}

void sf_experiment_free(sf_experiment* exp) { delete exp; }

sf_status sf_experiment_set(sf_experiment* exp, const char* key,
                            const char* value) {
  return Guard([&] {
    Require(exp && key && value, "null argument");
    const std::string_view k(key);
    if (k == "n") exp->n = ParseCount(value, key);
    else if (k == "d") exp->d = ParseCount(value, key);
    else if (k == "trials") exp->trials = ParseCount(value, key);
    else if (k == "seed") exp->seed = ParseSeed(value);
    else if (k == "p") exp->p = shapefit::ParseRealList(value);
    else if (k == "q") exp->q = shapefit::ParseRealList(value);
    else if (k == "sigma") exp->sigma = shapefit::ParseRealList(value);
    else if (k == "sigma_log") {
      const std::vector<double> v = shapefit::ParseRealList(value);
      Require(v.size() == 3 && v[2] == static_cast<int>(v[2]),
              "sigma_log expects lo,hi,count");
      exp->sigma = shapefit::LogSpaced(v[0], v[1], static_cast<int>(v[2]));
    } else if (k == "algos") exp->algos = shapefit::ParseAlgorithmList(value);
    else shapefit::ApplySolverSetting(exp->solver, key, value);
  });
}

sf_status sf_sweep_run(const sf_experiment* exp, int workers, char** csv,
                       char** trial_log) {
  return Guard([&] {
    Require(exp && csv, "null argument");
    shapefit::SweepSpec spec;
    spec.n = exp->n;
    spec.d = exp->d;
    spec.trials = exp->trials;
    spec.base_seed = exp->seed;
    spec.p_grid = exp->p;
    spec.q_grid = exp->q;
    spec.sigma = Single(exp->sigma, "sigma");
    spec.algos = exp->algos;
    spec.solver = exp->solver;
    EmitCsv(shapefit::RunSweep(spec, workers), false, csv, trial_log);
  });
}

sf_status sf_noise_curve_run(const sf_experiment* exp, int workers, char** csv,
                             char** trial_log) {
  return Guard([&] {
    Require(exp && csv, "null argument");
    shapefit::NoiseCurveSpec spec;
    spec.n = exp->n;
    spec.d = exp->d;
    spec.trials = exp->trials;
    spec.base_seed = exp->seed;
    spec.p = Single(exp->p, "p");
    spec.q = Single(exp->q, "q");
    spec.sigmas = exp->sigma;
    spec.algos = exp->algos;
    spec.solver = exp->solver;
    EmitCsv(shapefit::RunNoiseCurve(spec, workers), true, csv, trial_log);
  });
}

}  // extern "C"
