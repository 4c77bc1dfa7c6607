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

#ifndef SHAPEFIT_MODEL_HPP_
#define SHAPEFIT_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace shapefit {

// Row k holds the k-th point (or edge vector). d is small (usually 3), so
// row-major keeps each point contiguous.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  kInvalidArgument = 1,
  kDisconnected,
  kGeneration,
  kIo,
  kParse,
  kSolver,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Tolerance on |‖v‖ - 1| for a stored direction to count as unit length.
inline constexpr double kUnitTolerance = 1e-12;

// n points in R^d. Always n >= 2, d >= 1, all coordinates finite.
class PointCloud {
 public:
  explicit PointCloud(Matrix points);

  int size() const { return static_cast<int>(points_.rows()); }
  int dimension() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }
  Eigen::Ref<const Eigen::RowVectorXd> point(int i) const {
    return points_.row(i);
  }

 private:
  Matrix points_;
};

// Returns {alpha * (t_i + w)}. Throws on alpha <= 0 or a mismatched w.
PointCloud ApplyGauge(const PointCloud& cloud, double alpha,
                      const Eigen::RowVectorXd& w);

struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Observed pairwise directions. Edges are stored as (i, j) with i < j and
// directions[k] points from j towards i, i.e. v_ij ~ t_i - t_j.
//
// The constructor only enforces shape consistency so that malformed inputs
// can still be represented and reported by ValidateInstance.
class DirectionGraph {
 public:
  DirectionGraph(int num_vertices, std::vector<Edge> edges, Matrix directions,
                 std::optional<std::vector<bool>> is_camera = std::nullopt);

  // Builds a canonical graph from observations in any orientation: an edge
  // given as (j, i) with j > i is stored as (i, j) with the direction negated.
  static DirectionGraph FromObservations(
      int num_vertices, const std::vector<Edge>& edges,
      const Matrix& directions,
      std::optional<std::vector<bool>> is_camera = std::nullopt);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int dimension() const { return static_cast<int>(directions_.cols()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& directions() const { return directions_; }
  Eigen::Ref<const Eigen::RowVectorXd> direction(int k) const {
    return directions_.row(k);
  }
  // Bipartite mode: is_camera()[v] marks camera vertices, the rest are
  // structure points.
  const std::optional<std::vector<bool>>& is_camera() const {
    return is_camera_;
  }

  bool IsConnected() const;

 private:
  int num_vertices_;
  std::vector<Edge> edges_;
  Matrix directions_;
  std::optional<std::vector<bool>> is_camera_;
};

struct GenParams {
  double p = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct ProblemInstance {
  DirectionGraph graph;
  std::optional<PointCloud> truth;
  std::optional<std::vector<int>> corrupted_edges;
  std::optional<GenParams> gen_params;
};

enum class ViolationKind {
  kBadShape,
  kVertexOutOfRange,
  kSelfLoop,
  kNotCanonical,
  kDuplicateEdge,
  kNonUnitDirection,
  kNonFiniteDirection,
  kPartitionNotCrossed,
  kDisconnected,
  kTruthMismatch,
  kCorruptedIndexOutOfRange,
};

struct Violation {
  ViolationKind kind;
  int index;  // edge or vertex index, -1 when the violation is global
  std::string message;
};

// Every violated DirectionGraph / ProblemInstance invariant. Empty iff valid.
std::vector<Violation> ValidateInstance(const ProblemInstance& inst);

// Throws Error(kDisconnected / kInvalidArgument) unless the instance is
// admissible for a solver.
void RequireSolvable(const ProblemInstance& inst);

struct SolveReport {
  explicit SolveReport(PointCloud locs) : locations(std::move(locs)) {}

  PointCloud locations;
  int iterations = 0;
  double final_primal_residual = 0.0;
  double final_dual_residual = 0.0;
  double objective = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> rfe;
  bool converged = false;
};

// Gauge-constraint defects of a point cloud with respect to a graph:
// ‖Σ t_i‖ and |Σ_k <t_i - t_j, v_k> - 1|.
struct GaugeDefect {
  double translation = 0.0;
  double scale = 0.0;
};
GaugeDefect MeasureGauge(const DirectionGraph& graph, const Matrix& points);

}  // namespace shapefit

#endif  // SHAPEFIT_MODEL_HPP_
