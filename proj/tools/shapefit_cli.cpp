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

// Command-line front end. Talks to the library through the C API only.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapefit/shapefit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown for failures that map to an exit code.
struct Exit {
  int code;
  std::string message;
};

void Check(sf_status status, int code_on_error = kExitRuntime) {
  if (status == SF_OK) return;
  throw Exit{code_on_error, std::string(sf_status_name(status)) + ": " +
                       sf_last_error()};
}

// For calls whose only invalid arguments come from the command line.
int ConfigExit(sf_status status) {
  return status == SF_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Instance =
    std::unique_ptr<sf_instance, Deleter<sf_instance, sf_instance_free>>;
using Options =
    std::unique_ptr<sf_options, Deleter<sf_options, sf_options_free>>;
using Report = std::unique_ptr<sf_report, Deleter<sf_report, sf_report_free>>;
using Experiment =
    std::unique_ptr<sf_experiment, Deleter<sf_experiment, sf_experiment_free>>;
using Text = std::unique_ptr<char, Deleter<char, sf_string_free>>;

// Solver settings exposed as --<flag>; each maps onto a library key.
struct SolverFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr SolverFlag kSolverFlags[] = {
    {"rho0", "rho0", "ShapeFit ADMM initial penalty"},
    {"max-iters", "max_iters", "ShapeFit ADMM iteration cap"},
    {"eps-primal", "eps_primal", "ShapeFit primal residual tolerance"},
    {"eps-dual", "eps_dual", "ShapeFit dual residual tolerance"},
    {"relaxation", "relaxation", "ShapeFit over-relaxation factor"},
    {"kick-rho0", "kick.rho0", "ShapeKick initial penalty"},
    {"kick-factor", "kick.factor", "ShapeKick penalty multiplier per kick"},
    {"kick-window", "kick.window", "ShapeKick stagnation window"},
    {"kick-tol", "kick.tol", "ShapeKick stagnation tolerance"},
    {"kick-max-kicks", "kick.max_kicks", "ShapeKick number of kicks"},
    {"kick-phase-iters", "kick.phase_iters", "ShapeKick phase iteration cap"},
    {"kick-final-iters", "kick.final_iters", "ShapeKick last phase cap"},
    {"kick-eps-primal", "kick.eps_primal", "ShapeKick primal tolerance"},
    {"kick-eps-dual", "kick.eps_dual", "ShapeKick dual tolerance"},
    {"lud-rho0", "lud.rho0", "LUD initial penalty"},
    {"lud-factor", "lud.factor", "LUD penalty multiplier per kick"},
    {"lud-window", "lud.window", "LUD stagnation window"},
    {"lud-tol", "lud.tol", "LUD stagnation tolerance"},
    {"lud-max-kicks", "lud.max_kicks", "LUD number of kicks"},
    {"lud-phase-iters", "lud.phase_iters", "LUD phase iteration cap"},
    {"lud-final-iters", "lud.final_iters", "LUD last phase cap"},
    {"lud-eps-primal", "lud.eps_primal", "LUD primal tolerance"},
    {"lud-eps-dual", "lud.eps_dual", "LUD dual tolerance"},
};

struct Args {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;

  std::optional<int> n;
  std::vector<std::string> p;
  std::vector<std::string> q;
  std::vector<std::string> sigma;
  std::vector<std::string> sigma_log;
  int d = 3;
  int cameras = 0;
  int structure = 0;
  std::optional<int> trials;
  std::string algo = "shapefit";
  std::vector<std::string> algos;
  std::string program = "shapefit";
  std::string instance;
  std::string trials_out;
  std::map<std::string, std::string> solver;
};

// List options accept "a,b" on the command line and arrays in config files.
std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

double SingleReal(const std::vector<std::string>& text, const char* name,
                  double fallback) {
  if (text.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(text[0], &used);
    if (text.size() == 1 && used == text[0].size()) return v;
  } catch (const std::exception&) {
  }
  throw Exit{kExitUsage, std::string("--") + name + " expects one number"};
}

void WriteText(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw Exit{kExitRuntime, "cannot write " + path};
}

std::string Real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int RunGen(const Args& a) {
  if (a.out.empty()) throw Exit{kExitUsage, "gen needs --out"};
  sf_gen_config cfg;
  sf_gen_config_init(&cfg);
  cfg.p = SingleReal(a.p, "p", 0.0);
  cfg.q = SingleReal(a.q, "q", 0.0);
  cfg.sigma = SingleReal(a.sigma, "sigma", 0.0);
  cfg.d = a.d;
  cfg.seed = a.seed;
  cfg.num_cameras = a.cameras;
  cfg.num_structure = a.structure;
  if (a.cameras > 0 || a.structure > 0) {
    cfg.n = a.cameras + a.structure;
  } else if (a.n) {
    cfg.n = *a.n;
  } else {
    throw Exit{kExitUsage, "gen needs -n (or --cameras and --structure)"};
  }
  sf_instance* raw = nullptr;
  const sf_status status = sf_generate(&cfg, &raw);
  Check(status, ConfigExit(status));
  const Instance inst(raw);
  Check(sf_instance_save(inst.get(), a.out.c_str()));
  sf_instance_info info{};
  Check(sf_instance_info_get(inst.get(), &info));
  std::printf("n=%d m=%d bad=%d\n", info.n, info.m,
              info.num_corrupted < 0 ? 0 : info.num_corrupted);
  return kExitOk;
}

Instance Load(const std::string& path) {
  sf_instance* raw = nullptr;
  Check(sf_instance_load(path.c_str(), &raw));
  return Instance(raw);
}

std::string RfeText(const sf_report* report) {
  double rfe = 0.0;
  if (!sf_report_rfe(report, &rfe)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", rfe);
  return buf;
}

void ApplySolverFlags(const Args& a,
                      const std::function<sf_status(const char*, const char*)>&
                          set) {
  for (const auto& [key, value] : a.solver) {
    Check(set(key.c_str(), value.c_str()), kExitUsage);
  }
}

int RunSolve(const Args& a) {
  sf_algorithm algo;
  Check(sf_algorithm_parse(a.algo.c_str(), &algo), kExitUsage);
  sf_options* raw_opts = nullptr;
  Check(sf_options_create(&raw_opts));
  const Options opts(raw_opts);
  Check(sf_options_set_algorithm(opts.get(), algo));
  ApplySolverFlags(a, [&](const char* k, const char* v) {
    return sf_options_set(opts.get(), k, v);
  });

  const Instance inst = Load(a.instance);
  sf_report* raw = nullptr;
  Check(sf_solve(inst.get(), opts.get(), &raw));
  const Report report(raw);
  if (!a.out.empty()) Check(sf_report_save(report.get(), a.out.c_str()));
  std::printf("algo=%s iters=%d obj=%s rfe=%s seconds=%.3f\n",
              sf_algorithm_name(algo), sf_report_iterations(report.get()),
              Real(sf_report_objective(report.get())).c_str(),
              RfeText(report.get()).c_str(), sf_report_seconds(report.get()));
  return kExitOk;
}

int RunOracle(const Args& a) {
  sf_program program;
  if (a.program == "shapefit") {
    program = SF_PROGRAM_SHAPEFIT;
  } else if (a.program == "lud") {
    program = SF_PROGRAM_LUD;
  } else {
    throw Exit{kExitUsage, "--program must be shapefit or lud"};
  }
  const Instance inst = Load(a.instance);
  sf_report* raw = nullptr;
  Check(sf_oracle(inst.get(), program, &raw));
  const Report report(raw);
  if (!a.out.empty()) Check(sf_report_save(report.get(), a.out.c_str()));
  std::printf("program=%s iters=%d obj=%s rfe=%s seconds=%.3f\n",
              a.program.c_str(), sf_report_iterations(report.get()),
              Real(sf_report_objective(report.get())).c_str(),
              RfeText(report.get()).c_str(), sf_report_seconds(report.get()));
  return kExitOk;
}

int RunExperiment(const Args& a, bool noise) {
  sf_experiment* raw = nullptr;
  Check(sf_experiment_create(&raw));
  const Experiment exp(raw);
  const auto set = [&](const char* k, const std::string& v) {
    Check(sf_experiment_set(exp.get(), k, v.c_str()), kExitUsage);
  };
  set("seed", std::to_string(a.seed));
  set("d", std::to_string(a.d));
  if (a.n) set("n", std::to_string(*a.n));
  if (!a.p.empty()) set("p", Join(a.p));
  if (!a.q.empty()) set("q", Join(a.q));
  if (!a.sigma.empty()) set("sigma", Join(a.sigma));
  if (!a.sigma_log.empty()) {
    if (!noise) throw Exit{kExitUsage, "--sigma-log applies to noise-curve"};
    set("sigma_log", Join(a.sigma_log));
  }
  if (a.trials) set("trials", std::to_string(*a.trials));
  if (!a.algos.empty()) set("algos", Join(a.algos));
  ApplySolverFlags(a, [&](const char* k, const char* v) {
    return sf_experiment_set(exp.get(), k, v);
  });

  char* csv = nullptr;
  char* log = nullptr;
  char** log_out = a.trials_out.empty() ? nullptr : &log;
  const sf_status status =
      noise ? sf_noise_curve_run(exp.get(), a.workers, &csv, log_out)
            : sf_sweep_run(exp.get(), a.workers, &csv, log_out);
  Check(status, ConfigExit(status));
  const Text csv_text(csv);
  const Text log_text(log);
  WriteText(a.out, csv_text.get());
  if (log_text) WriteText(a.trials_out, log_text.get());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location recovery from pairwise directions (ShapeFit, "
               "ShapeKick, LUD)"};
  app.require_subcommand(1);
  // Options live on the top-level app so that a --config file can use plain
  // key=value lines; fallthrough lets them follow the subcommand too.
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key=value file");

  Args a;
  app.add_option("--seed", a.seed, "Random seed (generation, sweep base)");
  app.add_option("--workers", a.workers, "Worker threads for sweeps (0 = all)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("-o,--out", a.out, "Output file (stdout for tables)");

  const std::string gen_group = "Instances";
  app.add_option("-n", a.n, "Number of vertices")->group(gen_group);
  app.add_option("-p", a.p, "Edge probability (list for sweep)")
      ->delimiter(',')
      ->group(gen_group);
  app.add_option("-q", a.q, "Corruption probability (list for sweep)")
      ->delimiter(',')
      ->group(gen_group);
  app.add_option("--sigma", a.sigma, "Noise level (list for noise-curve)")
      ->delimiter(',')
      ->group(gen_group);
  app.add_option("--sigma-log", a.sigma_log,
                 "Log-spaced noise grid lo,hi,count (noise-curve)")
      ->delimiter(',')
      ->group(gen_group);
  app.add_option("--dim", a.d, "Ambient dimension")->group(gen_group);
  app.add_option("--cameras", a.cameras, "Bipartite mode: camera vertices")
      ->group(gen_group);
  app.add_option("--structure", a.structure,
                 "Bipartite mode: structure vertices")
      ->group(gen_group);
  app.add_option("--trials", a.trials, "Trials per cell")->group(gen_group);
  app.add_option("--trials-out", a.trials_out, "Per-trial CSV log")
      ->group(gen_group);

  const std::string solver_group = "Solver";
  app.add_option("--algo", a.algo, "shapefit, shapekick or lud")
      ->group(solver_group);
  app.add_option("--algos", a.algos, "Comma-separated algorithms (sweeps)")
      ->delimiter(',')
      ->group(solver_group);
  app.add_option("--program", a.program, "Oracle program: shapefit or lud")
      ->group(solver_group);
  for (const SolverFlag& f : kSolverFlags) {
    app.add_option_function<std::string>(
           std::string("--") + f.flag,
           [&a, key = std::string(f.key)](const std::string& v) {
             a.solver[key] = v;
           },
           f.help)
        ->group(solver_group);
  }

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("instance", a.instance, "Instance file")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "Phase diagram over (p, q)");
  CLI::App* noise =
      app.add_subcommand("noise-curve", "Mean RFE as a function of sigma");
  CLI::App* oracle =
      app.add_subcommand("oracle", "Reference minimizer for small instances");
  oracle->add_option("instance", a.instance, "Instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return RunGen(a);
    if (solve->parsed()) return RunSolve(a);
    if (sweep->parsed()) return RunExperiment(a, false);
    if (noise->parsed()) return RunExperiment(a, true);
    if (oracle->parsed()) return RunOracle(a);
  } catch (const Exit& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitUsage;
}
