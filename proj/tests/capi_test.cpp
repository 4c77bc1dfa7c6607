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

// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "shapefit/shapefit.h"

namespace {

sf_instance* Make(int n, double p, double q, double sigma, uint64_t seed) {
  sf_gen_config cfg;
  sf_gen_config_init(&cfg);
  cfg.n = n;
  cfg.p = p;
  cfg.q = q;
  cfg.sigma = sigma;
  cfg.seed = seed;
  sf_instance* inst = nullptr;
  REQUIRE(sf_generate(&cfg, &inst) == SF_OK);
  return inst;
}

std::string TempPath(const char* name) {
  return std::string(TEST_TMP_DIR) + "/" + name;
}

TEST_CASE("c api: status and algorithm names") {
  CHECK(std::string(sf_status_name(SF_OK)) == "ok");
  CHECK(std::string(sf_version()).size() > 0);
  sf_algorithm a;
  CHECK(sf_algorithm_parse("lud", &a) == SF_OK);
  CHECK(a == SF_ALGO_LUD);
  CHECK(std::string(sf_algorithm_name(SF_ALGO_SHAPEKICK)) == "shapekick");
  CHECK(sf_algorithm_parse("nope", &a) == SF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sf_last_error()).find("nope") != std::string::npos);
}

TEST_CASE("c api: generate, inspect, validate") {
  sf_instance* inst = Make(4, 1, 0, 0, 7);
  sf_instance_info info;
  REQUIRE(sf_instance_info_get(inst, &info) == SF_OK);
  CHECK(info.n == 4);
  CHECK(info.m == 6);
  CHECK(info.d == 3);
  CHECK(info.num_corrupted == 0);
  CHECK(info.has_truth == 1);
  int count = -1;
  char* msg = nullptr;
  CHECK(sf_instance_validate(inst, &count, &msg) == SF_OK);
  CHECK(count == 0);
  sf_string_free(msg);
  sf_instance_free(inst);
}

TEST_CASE("c api: generation failures carry a status") {
  sf_gen_config cfg;
  sf_gen_config_init(&cfg);
  cfg.n = 2;
  cfg.p = 0;
  sf_instance* inst = nullptr;
  CHECK(sf_generate(&cfg, &inst) == SF_ERR_GENERATION);
  CHECK(inst == nullptr);
  CHECK(sf_generate(nullptr, &inst) == SF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: solve and read back locations") {
  sf_instance* inst = Make(30, 0.5, 0, 0, 3);
  sf_options* opts = nullptr;
  REQUIRE(sf_options_create(&opts) == SF_OK);
  for (sf_algorithm algo : {SF_ALGO_SHAPEFIT, SF_ALGO_SHAPEKICK, SF_ALGO_LUD}) {
    REQUIRE(sf_options_set_algorithm(opts, algo) == SF_OK);
    sf_report* rep = nullptr;
    REQUIRE(sf_solve(inst, opts, &rep) == SF_OK);
    double rfe = 1;
    CHECK(sf_report_rfe(rep, &rfe) == 1);
    CHECK(rfe < 1e-6);
    CHECK(sf_report_iterations(rep) > 0);
    int n = 0, d = 0;
    std::vector<double> buf(90);
    CHECK(sf_report_locations(rep, buf.data(), buf.size(), &n, &d) == SF_OK);
    CHECK(n == 30);
    CHECK(d == 3);
    CHECK(sf_report_locations(rep, buf.data(), 10, &n, &d) ==
          SF_ERR_INVALID_ARGUMENT);
    sf_report_free(rep);
  }
  CHECK(sf_options_set(opts, "rho0", "2") == SF_OK);
  CHECK(sf_options_set(opts, "rho0", "x") == SF_ERR_INVALID_ARGUMENT);
  CHECK(sf_options_set(opts, "unknown", "1") == SF_ERR_INVALID_ARGUMENT);
  sf_options_free(opts);
  sf_instance_free(inst);
}

TEST_CASE("c api: save and load round trip") {
  sf_instance* inst = Make(12, 0.5, 0.2, 0.01, 5);
  const std::string path = TempPath("capi_roundtrip.inst");
  REQUIRE(sf_instance_save(inst, path.c_str()) == SF_OK);
  sf_instance* back = nullptr;
  REQUIRE(sf_instance_load(path.c_str(), &back) == SF_OK);
  sf_instance_info a, b;
  sf_instance_info_get(inst, &a);
  sf_instance_info_get(back, &b);
  CHECK(a.m == b.m);
  CHECK(a.num_corrupted == b.num_corrupted);
  sf_instance_free(back);
  sf_instance_free(inst);
  std::remove(path.c_str());
  CHECK(sf_instance_load("/nonexistent/x.inst", &back) == SF_ERR_IO);
}

TEST_CASE("c api: oracle") {
  sf_instance* inst = Make(6, 1, 0, 0, 2);
  sf_report* rep = nullptr;
  REQUIRE(sf_oracle(inst, SF_PROGRAM_SHAPEFIT, &rep) == SF_OK);
  double rfe = 1;
  CHECK(sf_report_rfe(rep, &rfe) == 1);
  CHECK(rfe < 1e-6);
  sf_report_free(rep);
  sf_instance_free(inst);
}

TEST_CASE("c api: sweep csv") {
  sf_experiment* exp = nullptr;
  REQUIRE(sf_experiment_create(&exp) == SF_OK);
  CHECK(sf_experiment_set(exp, "n", "20") == SF_OK);
  CHECK(sf_experiment_set(exp, "p", "0.5") == SF_OK);
  CHECK(sf_experiment_set(exp, "q", "0,0.1") == SF_OK);
  CHECK(sf_experiment_set(exp, "trials", "2") == SF_OK);
  CHECK(sf_experiment_set(exp, "algos", "shapefit,lud") == SF_OK);
  CHECK(sf_experiment_set(exp, "algos", "bogus") == SF_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  char* log = nullptr;
  REQUIRE(sf_sweep_run(exp, 2, &csv, &log) == SF_OK);
  const std::string text(csv);
  CHECK(text.rfind("algo,n,p,q,sigma,", 0) == 0);
  int lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 5);
  CHECK(std::string(log).find("seed") != std::string::npos);
  sf_string_free(csv);
  sf_string_free(log);
  sf_experiment_free(exp);
}

TEST_CASE("c api: null handles are rejected") {
  sf_report* rep = nullptr;
  CHECK(sf_solve(nullptr, nullptr, &rep) == SF_ERR_INVALID_ARGUMENT);
  sf_instance_free(nullptr);
  sf_report_free(nullptr);
  sf_options_free(nullptr);
  sf_experiment_free(nullptr);
}

}  // namespace
