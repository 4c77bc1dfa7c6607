/* Copyright 2026 The ShapeFit Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the shapefit shared library.
 *
 * Objects are opaque handles created by sf_*_create / sf_generate / sf_solve
 * and released with the matching sf_*_free (NULL is accepted). Every fallible
 * call returns an sf_status; on failure sf_last_error() describes the error
 * for the calling thread until its next failing call. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * sf_string_free. Handles are not synchronized: a handle may be read from
 * several threads but must not be modified concurrently. */

#ifndef SHAPEFIT_SHAPEFIT_H_
#define SHAPEFIT_SHAPEFIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_INVALID_ARGUMENT = 1,
  SF_ERR_DISCONNECTED = 2,
  SF_ERR_GENERATION = 3,
  SF_ERR_IO = 4,
  SF_ERR_PARSE = 5,
  SF_ERR_SOLVER = 6,
  SF_ERR_INTERNAL = 7
} sf_status;

typedef enum sf_algorithm {
  SF_ALGO_SHAPEFIT = 0,
  SF_ALGO_SHAPEKICK = 1,
  SF_ALGO_LUD = 2
} sf_algorithm;

typedef enum sf_program {
  SF_PROGRAM_SHAPEFIT = 0,
  SF_PROGRAM_LUD = 1
} sf_program;

typedef struct sf_instance sf_instance;
typedef struct sf_options sf_options;
typedef struct sf_report sf_report;
typedef struct sf_experiment sf_experiment;

SF_API const char* sf_version(void);
SF_API const char* sf_status_name(sf_status status);
/* Message of the latest failure on this thread; "" if there was none. */
SF_API const char* sf_last_error(void);
SF_API void sf_string_free(char* s);

/* Algorithm names: "shapefit", "shapekick", "lud". */
SF_API sf_status sf_algorithm_parse(const char* name, sf_algorithm* out);
SF_API const char* sf_algorithm_name(sf_algorithm algo);

/* ---- Instances ---------------------------------------------------------- */

typedef struct sf_gen_config {
  int n;
  double p;
  double q;
  double sigma;
  int d;
  uint64_t seed;
  /* Bipartite mode when num_cameras > 0: n is ignored, every
   * camera/structure pair is an edge with probability p. */
  int num_cameras;
  int num_structure;
} sf_gen_config;

/* Zero counts and probabilities, d = 3, seed 0. */
SF_API void sf_gen_config_init(sf_gen_config* cfg);
SF_API sf_status sf_generate(const sf_gen_config* cfg, sf_instance** out);

SF_API sf_status sf_instance_load(const char* path, sf_instance** out);
SF_API sf_status sf_instance_save(const sf_instance* inst, const char* path);
SF_API void sf_instance_free(sf_instance* inst);

typedef struct sf_instance_info {
  int n;
  int m;
  int d;
  int num_corrupted; /* -1 when the instance carries no corruption record */
  int has_truth;
} sf_instance_info;

SF_API sf_status sf_instance_info_get(const sf_instance* inst,
                                      sf_instance_info* out);
/* Number of invariant violations (0 = valid). When messages is not NULL it
 * receives one violation per line. */
SF_API sf_status sf_instance_validate(const sf_instance* inst, int* count,
                                      char** messages);

/* ---- Solving ------------------------------------------------------------ */

SF_API sf_status sf_options_create(sf_options** out);
SF_API void sf_options_free(sf_options* opts);
SF_API sf_status sf_options_set_algorithm(sf_options* opts, sf_algorithm algo);
/* Solver settings by key, e.g. "rho0", "max_iters", "kick.factor",
 * "lud.final_iters"; see the README for the full list. */
SF_API sf_status sf_options_set(sf_options* opts, const char* key,
                                const char* value);

SF_API sf_status sf_solve(const sf_instance* inst, const sf_options* opts,
                          sf_report** out);
/* Reference minimizer for small instances (at most 30 vertices). */
SF_API sf_status sf_oracle(const sf_instance* inst, sf_program program,
                           sf_report** out);
SF_API void sf_report_free(sf_report* report);

SF_API int sf_report_iterations(const sf_report* report);
SF_API double sf_report_objective(const sf_report* report);
SF_API double sf_report_seconds(const sf_report* report);
SF_API int sf_report_converged(const sf_report* report);
SF_API double sf_report_primal_residual(const sf_report* report);
SF_API double sf_report_dual_residual(const sf_report* report);
/* Returns 1 and stores the RFE if the instance had ground truth, else 0. */
SF_API int sf_report_rfe(const sf_report* report, double* rfe);
/* Copies the n x d locations row by row; len must be at least n * d. */
SF_API sf_status sf_report_locations(const sf_report* report, double* buf,
                                     size_t len, int* n, int* d);
SF_API sf_status sf_report_save(const sf_report* report, const char* path);

/* ---- Experiments -------------------------------------------------------- */

/* Settings for sweeps and noise curves. Keys besides the solver keys:
 *   n, d, trials, seed        integers
 *   p, q, sigma               comma-separated lists of reals
 *   sigma_log                 "lo,hi,count": log-spaced sigma grid
 *   algos                     comma-separated algorithm names
 * A sweep uses the p and q grids and a single sigma; a noise curve uses a
 * single p and q and the sigma grid. */
SF_API sf_status sf_experiment_create(sf_experiment** out);
SF_API void sf_experiment_free(sf_experiment* exp);
SF_API sf_status sf_experiment_set(sf_experiment* exp, const char* key,
                                   const char* value);

/* CSV text of the cell table; trial_log (optional) receives one row per
 * trial. workers = 0 uses every hardware thread. */
SF_API sf_status sf_sweep_run(const sf_experiment* exp, int workers,
                              char** csv, char** trial_log);
SF_API sf_status sf_noise_curve_run(const sf_experiment* exp, int workers,
                                    char** csv, char** trial_log);

#ifdef __cplusplus
}
#endif

#endif /* SHAPEFIT_SHAPEFIT_H_ */
