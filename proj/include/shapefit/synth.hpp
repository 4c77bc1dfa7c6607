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

#ifndef SHAPEFIT_SYNTH_HPP_
#define SHAPEFIT_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "shapefit/model.hpp"

namespace shapefit {

struct BipartiteSpec {
  int num_cameras = 0;
  int num_structure = 0;
  double p = 1.0;  // probability of each camera/structure pair
};

struct GenConfig {
  int n = 0;
  double p = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  int d = 3;
  std::uint64_t seed = 0;
  std::optional<BipartiteSpec> bipartite;
};

// Number of seeds tried (seed, seed+1, ...) before giving up on drawing a
// connected, non-degenerate instance.
inline constexpr int kMaxGenerationAttempts = 100;

// Random instance: i.i.d. N(0, I) locations, Erdős–Rényi graph, and per-edge
// Bernoulli(q) corruption by a Gaussian direction; uncorrupted edges get the
// true direction plus sigma * N(0, I) before normalization.
//
// Draw order per attempt: all locations (row by row), one uniform per vertex
// pair in lexicographic (i, j) order, then for each edge in storage order the
// corruption coin followed by its d noise coordinates.
ProblemInstance Generate(const GenConfig& cfg);

// Same model restricted to camera/structure pairs. Vertices [0, num_cameras)
// are cameras. cfg.n and cfg.p are ignored.
ProblemInstance GenerateBipartite(const GenConfig& cfg);

// Replaces the directions of the given edges with user-supplied ones (each
// normalized) and records them as corrupted. For adversarial experiments.
ProblemInstance InjectCorruption(const ProblemInstance& inst,
                                 const std::vector<int>& edge_indices,
                                 const Matrix& directions);

}  // namespace shapefit

#endif  // SHAPEFIT_SYNTH_HPP_
