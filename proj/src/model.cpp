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

#include "shapefit/model.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace shapefit {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "point cloud needs at least 2 points");
  }
  if (points_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "point cloud dimension must be positive");
  }
  if (!points_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "point cloud has non-finite coordinates");
  }
}

PointCloud ApplyGauge(const PointCloud& cloud, double alpha,
                      const Eigen::RowVectorXd& w) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gauge scale must be positive");
  }
  if (w.size() != cloud.dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "gauge translation has the wrong dimension");
  }
  Matrix out = cloud.points();
  out.rowwise() += w;
  out *= alpha;
  return PointCloud(std::move(out));
}

DirectionGraph::DirectionGraph(int num_vertices, std::vector<Edge> edges,
                               Matrix directions,
                               std::optional<std::vector<bool>> is_camera)
    : num_vertices_(num_vertices),
      edges_(std::move(edges)),
      directions_(std::move(directions)),
      is_camera_(std::move(is_camera)) {
  if (num_vertices_ < 2) {
    throw Error(ErrorCode::kInvalidArgument, "graph needs at least 2 vertices");
  }
  if (directions_.rows() != static_cast<Eigen::Index>(edges_.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "one direction per edge is required");
  }
  if (directions_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "direction dimension must be positive");
  }
  if (is_camera_ &&
      is_camera_->size() != static_cast<std::size_t>(num_vertices_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "partition must label every vertex");
  }
}

DirectionGraph DirectionGraph::FromObservations(
    int num_vertices, const std::vector<Edge>& edges, const Matrix& directions,
    std::optional<std::vector<bool>> is_camera) {
  std::vector<Edge> canonical = edges;
  Matrix dirs = directions;
  for (std::size_t k = 0; k < canonical.size(); ++k) {
    Edge& e = canonical[k];
    if (e.i > e.j) {
      std::swap(e.i, e.j);
      if (static_cast<Eigen::Index>(k) < dirs.rows()) dirs.row(k) *= -1.0;
    }
  }
  return DirectionGraph(num_vertices, std::move(canonical), std::move(dirs),
                        std::move(is_camera));
}

bool DirectionGraph::IsConnected() const {
  std::vector<int> parent(num_vertices_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int components = num_vertices_;
  for (const Edge& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= num_vertices_ || e.j >= num_vertices_) {
      continue;
    }
    const int a = find(e.i);
    const int b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

namespace {

std::string EdgeLabel(int k, const Edge& e) {
  return "edge " + std::to_string(k) + " (" + std::to_string(e.i) + ", " +
         std::to_string(e.j) + ")";
}

}  // namespace

std::vector<Violation> ValidateInstance(const ProblemInstance& inst) {
  std::vector<Violation> out;
  const DirectionGraph& g = inst.graph;
  const int n = g.num_vertices();
  std::set<std::pair<int, int>> seen;

  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      out.push_back({ViolationKind::kVertexOutOfRange, k,
                     EdgeLabel(k, e) + " references a missing vertex"});
      continue;
    }
    if (e.i == e.j) {
      out.push_back(
          {ViolationKind::kSelfLoop, k, EdgeLabel(k, e) + " is a self-loop"});
    } else if (e.i > e.j) {
      out.push_back({ViolationKind::kNotCanonical, k,
                     EdgeLabel(k, e) + " is not stored with i < j"});
    }
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert({key.first, key.second}).second) {
      out.push_back({ViolationKind::kDuplicateEdge, k,
                     EdgeLabel(k, e) + " duplicates an earlier edge"});
    }
    const auto v = g.direction(k);
    if (!v.allFinite()) {
      out.push_back({ViolationKind::kNonFiniteDirection, k,
                     EdgeLabel(k, e) + " has a non-finite direction"});
    } else if (std::abs(v.norm() - 1.0) > kUnitTolerance) {
      out.push_back({ViolationKind::kNonUnitDirection, k,
                     EdgeLabel(k, e) + " direction has norm " +
                         std::to_string(v.norm())});
    }
    if (g.is_camera() && (*g.is_camera())[e.i] == (*g.is_camera())[e.j]) {
      out.push_back({ViolationKind::kPartitionNotCrossed, k,
                     EdgeLabel(k, e) + " does not cross the partition"});
    }
  }

  if (!g.IsConnected()) {
    out.push_back(
        {ViolationKind::kDisconnected, -1, "observation graph is disconnected"});
  }

  if (inst.truth) {
    if (inst.truth->dimension() != g.dimension() ||
        inst.truth->size() != n) {
      out.push_back({ViolationKind::kTruthMismatch, -1,
                     "ground truth shape does not match the graph"});
    }
  }
  if (inst.corrupted_edges) {
    for (int idx : *inst.corrupted_edges) {
      if (idx < 0 || idx >= g.num_edges()) {
        out.push_back({ViolationKind::kCorruptedIndexOutOfRange, idx,
                       "corrupted edge index " + std::to_string(idx) +
                           " is out of range"});
      }
    }
  }
  return out;
}

void RequireSolvable(const ProblemInstance& inst) {
  const auto violations = ValidateInstance(inst);
  if (violations.empty()) return;
  for (const Violation& v : violations) {
    if (v.kind == ViolationKind::kDisconnected) {
      throw Error(ErrorCode::kDisconnected, v.message);
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              "invalid instance: " + violations.front().message);
}

GaugeDefect MeasureGauge(const DirectionGraph& graph, const Matrix& points) {
  GaugeDefect defect;
  defect.translation = points.colwise().sum().norm();
  double s = 0.0;
  for (int k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edges()[k];
    s += (points.row(e.i) - points.row(e.j)).dot(graph.direction(k));
  }
  defect.scale = std::abs(s - 1.0);
  return defect;
}

}  // namespace shapefit
