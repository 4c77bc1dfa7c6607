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

#include "shapefit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "shapefit/rng.hpp"

namespace shapefit {
namespace {

constexpr double kMinSeparation = 1e-12;

void CheckConfig(const GenConfig& cfg) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (cfg.d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  }
  if (!in_unit(cfg.q)) {
    throw Error(ErrorCode::kInvalidArgument, "q must lie in [0, 1]");
  }
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  }
  if (cfg.bipartite) {
    const BipartiteSpec& b = *cfg.bipartite;
    if (b.num_cameras < 1 || b.num_structure < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bipartite mode needs at least one vertex on each side");
    }
    if (!in_unit(b.p)) {
      throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
    }
  } else {
    if (cfg.n < 2) {
      throw Error(ErrorCode::kInvalidArgument, "n must be at least 2");
    }
    if (!in_unit(cfg.p)) {
      throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
    }
  }
}

bool HasCoincidentPair(const Matrix& t) {
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < t.rows(); ++j) {
      if ((t.row(i) - t.row(j)).norm() < kMinSeparation) return true;
    }
  }
  return false;
}

// Shared body of Generate/GenerateBipartite; `pair_allowed` restricts which
// vertex pairs are candidate edges.
template <typename PairAllowed>
ProblemInstance GenerateImpl(const GenConfig& cfg, int n, double p,
                             std::optional<std::vector<bool>> is_camera,
                             PairAllowed pair_allowed) {
  const int d = cfg.d;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    Rng rng(cfg.seed + static_cast<std::uint64_t>(attempt));

    Matrix t(n, d);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) t(i, c) = rng.Normal();
    }
    if (HasCoincidentPair(t)) continue;

    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!pair_allowed(i, j)) continue;
        if (rng.Uniform() < p) edges.push_back({i, j});
      }
    }

    Matrix dirs(static_cast<Eigen::Index>(edges.size()), d);
    std::vector<int> corrupted;
    Eigen::RowVectorXd eta(d);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      const bool bad = rng.Uniform() < cfg.q;
      Eigen::RowVectorXd v(d);
      // A zero-norm draw has probability zero; redraw the noise if it occurs.
      do {
        for (int c = 0; c < d; ++c) eta(c) = rng.Normal();
        if (bad) {
          v = eta;
        } else {
          const Eigen::RowVectorXd diff = t.row(e.i) - t.row(e.j);
          v = diff / diff.norm() + cfg.sigma * eta;
        }
      } while (!(v.norm() > 0.0));
      dirs.row(static_cast<Eigen::Index>(k)) = v / v.norm();
      if (bad) corrupted.push_back(static_cast<int>(k));
    }

    DirectionGraph graph(n, std::move(edges), std::move(dirs), is_camera);
    if (!graph.IsConnected()) continue;

    return ProblemInstance{std::move(graph), PointCloud(std::move(t)),
                           std::move(corrupted),
                           GenParams{p, cfg.q, cfg.sigma, cfg.seed}};
  }
  throw Error(ErrorCode::kGeneration,
              "failed to draw a connected instance after " +
                  std::to_string(kMaxGenerationAttempts) + " attempts");
}

}  // namespace

ProblemInstance Generate(const GenConfig& cfg) {
  if (cfg.bipartite) return GenerateBipartite(cfg);
  CheckConfig(cfg);
  return GenerateImpl(cfg, cfg.n, cfg.p, std::nullopt,
                      [](int, int) { return true; });
}

ProblemInstance GenerateBipartite(const GenConfig& cfg) {
  if (!cfg.bipartite) {
    throw Error(ErrorCode::kInvalidArgument,
                "bipartite generation needs a bipartite spec");
  }
  CheckConfig(cfg);
  const BipartiteSpec& b = *cfg.bipartite;
  const int n = b.num_cameras + b.num_structure;
  std::vector<bool> is_camera(n, false);
  std::fill(is_camera.begin(), is_camera.begin() + b.num_cameras, true);
  const int cams = b.num_cameras;
  return GenerateImpl(cfg, n, b.p, is_camera,
                      [cams](int i, int j) { return (i < cams) != (j < cams); });
}

ProblemInstance InjectCorruption(const ProblemInstance& inst,
                                 const std::vector<int>& edge_indices,
                                 const Matrix& directions) {
  const DirectionGraph& g = inst.graph;
  if (directions.rows() != static_cast<Eigen::Index>(edge_indices.size()) ||
      directions.cols() != g.dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "one replacement direction per corrupted edge is required");
  }
  Matrix dirs = g.directions();
  std::set<int> bad;
  if (inst.corrupted_edges) {
    bad.insert(inst.corrupted_edges->begin(), inst.corrupted_edges->end());
  }
  for (std::size_t r = 0; r < edge_indices.size(); ++r) {
    const int k = edge_indices[r];
    if (k < 0 || k >= g.num_edges()) {
      throw Error(ErrorCode::kInvalidArgument, "edge index out of range");
    }
    const double norm = directions.row(static_cast<Eigen::Index>(r)).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "replacement direction must be nonzero");
    }
    dirs.row(k) = directions.row(static_cast<Eigen::Index>(r)) / norm;
    bad.insert(k);
  }
  return ProblemInstance{
      DirectionGraph(g.num_vertices(), g.edges(), std::move(dirs),
                     g.is_camera()),
      inst.truth, std::vector<int>(bad.begin(), bad.end()), inst.gen_params};
}

}  // namespace shapefit
