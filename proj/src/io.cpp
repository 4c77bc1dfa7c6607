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

#include "shapefit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace shapefit {
namespace {

[[noreturn]] void ParseFail(int line_no, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line_no) + ": " + what);
}

double ParseReal(const std::string& token, int line_no) {
  if (token == "NaN" || token == "nan") return std::nan("");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    ParseFail(line_no, "bad number '" + token + "'");
  }
  if (used != token.size()) ParseFail(line_no, "bad number '" + token + "'");
  return v;
}

long long ParseInt(const std::string& token, int line_no) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (const std::exception&) {
    ParseFail(line_no, "bad integer '" + token + "'");
  }
  if (used != token.size()) ParseFail(line_no, "bad integer '" + token + "'");
  return v;
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

// Parses `key=value` tokens starting at `first`.
std::map<std::string, std::string> KeyValues(
    const std::vector<std::string>& toks, std::size_t first, int line_no) {
  std::map<std::string, std::string> kv;
  for (std::size_t i = first; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      ParseFail(line_no, "expected key=value, got '" + toks[i] + "'");
    }
    kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return kv;
}

const std::string& Require(const std::map<std::string, std::string>& kv,
                           const std::string& key, int line_no) {
  const auto it = kv.find(key);
  if (it == kv.end()) ParseFail(line_no, "missing '" + key + "='");
  return it->second;
}

void WriteRow(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& r) {
  for (Eigen::Index c = 0; c < r.size(); ++c) out << ' ' << FormatReal(r(c));
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string FormatReal(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void WriteInstance(std::ostream& out, const ProblemInstance& inst) {
  const DirectionGraph& g = inst.graph;
  out << "shapefit-instance v1 d=" << g.dimension()
      << " n=" << g.num_vertices() << " m=" << g.num_edges() << '\n';
  for (int k = 0; k < g.num_edges(); ++k) {
    out << "e " << g.edges()[k].i << ' ' << g.edges()[k].j;
    WriteRow(out, g.direction(k));
    out << '\n';
  }
  if (inst.truth) {
    for (int i = 0; i < inst.truth->size(); ++i) {
      out << "t " << i;
      WriteRow(out, inst.truth->point(i));
      out << '\n';
    }
  }
  if (g.is_camera()) {
    out << "cameras";
    for (int v = 0; v < g.num_vertices(); ++v) {
      if ((*g.is_camera())[v]) out << ' ' << v;
    }
    out << '\n';
  }
  if (inst.corrupted_edges) {
    out << "bad";
    for (int k : *inst.corrupted_edges) out << ' ' << k;
    out << '\n';
  }
  if (inst.gen_params) {
    const GenParams& gp = *inst.gen_params;
    out << "gen p=" << FormatReal(gp.p) << " q=" << FormatReal(gp.q)
        << " sigma=" << FormatReal(gp.sigma) << " seed=" << gp.seed << '\n';
  }
}

ProblemInstance ReadInstance(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) ParseFail(line_no, "empty input");
  const auto head = Tokens(line);
  if (head.size() != 5 || head[0] != "shapefit-instance" || head[1] != "v1") {
    ParseFail(line_no, "expected 'shapefit-instance v1 d=.. n=.. m=..'");
  }
  const auto hkv = KeyValues(head, 2, line_no);
  const long long d = ParseInt(Require(hkv, "d", line_no), line_no);
  const long long n = ParseInt(Require(hkv, "n", line_no), line_no);
  const long long m = ParseInt(Require(hkv, "m", line_no), line_no);
  if (d < 1 || n < 2 || m < 0) ParseFail(line_no, "bad header sizes");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  Matrix dirs(m, d);
  Matrix truth(n, d);
  int truth_rows = 0;
  std::optional<std::vector<bool>> is_camera;
  std::optional<std::vector<int>> bad;
  std::optional<GenParams> gen;

  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = Tokens(line);
    if (toks.empty()) continue;
    const std::string& tag = toks[0];
    if (tag == "e") {
      if (static_cast<long long>(edges.size()) >= m) {
        ParseFail(line_no, "more edges than the header declares");
      }
      if (truth_rows > 0) ParseFail(line_no, "edge after ground truth");
      if (toks.size() != static_cast<std::size_t>(3 + d)) {
        ParseFail(line_no, "edge line needs i, j and " + std::to_string(d) +
                               " coordinates");
      }
      const int k = static_cast<int>(edges.size());
      edges.push_back({static_cast<int>(ParseInt(toks[1], line_no)),
                       static_cast<int>(ParseInt(toks[2], line_no))});
      for (long long c = 0; c < d; ++c) {
        dirs(k, c) = ParseReal(toks[3 + c], line_no);
      }
    } else if (tag == "t") {
      if (toks.size() != static_cast<std::size_t>(2 + d)) {
        ParseFail(line_no, "truth line needs an index and " +
                               std::to_string(d) + " coordinates");
      }
      if (ParseInt(toks[1], line_no) != truth_rows || truth_rows >= n) {
        ParseFail(line_no, "truth lines must list vertices 0..n-1 in order");
      }
      for (long long c = 0; c < d; ++c) {
        truth(truth_rows, c) = ParseReal(toks[2 + c], line_no);
      }
      ++truth_rows;
    } else if (tag == "cameras") {
      is_camera.emplace(static_cast<std::size_t>(n), false);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const long long v = ParseInt(toks[i], line_no);
        if (v < 0 || v >= n) ParseFail(line_no, "camera index out of range");
        (*is_camera)[static_cast<std::size_t>(v)] = true;
      }
    } else if (tag == "bad") {
      bad.emplace();
      for (std::size_t i = 1; i < toks.size(); ++i) {
        bad->push_back(static_cast<int>(ParseInt(toks[i], line_no)));
      }
    } else if (tag == "gen") {
      const auto kv = KeyValues(toks, 1, line_no);
      GenParams gp;
      gp.p = ParseReal(Require(kv, "p", line_no), line_no);
      gp.q = ParseReal(Require(kv, "q", line_no), line_no);
      gp.sigma = ParseReal(Require(kv, "sigma", line_no), line_no);
      const std::string& seed = Require(kv, "seed", line_no);
      try {
        std::size_t used = 0;
        gp.seed = std::stoull(seed, &used);
        if (used != seed.size()) throw std::invalid_argument(seed);
      } catch (const std::exception&) {
        ParseFail(line_no, "bad seed '" + seed + "'");
      }
      gen = gp;
    } else {
      ParseFail(line_no, "unknown record '" + tag + "'");
    }
  }
  if (static_cast<long long>(edges.size()) != m) {
    ParseFail(line_no, "expected " + std::to_string(m) + " edges, found " +
                           std::to_string(edges.size()));
  }
  if (truth_rows != 0 && truth_rows != n) {
    ParseFail(line_no, "ground truth must list all " + std::to_string(n) +
                           " vertices");
  }

  ProblemInstance inst{
      DirectionGraph(static_cast<int>(n), std::move(edges), std::move(dirs),
                     std::move(is_camera)),
      std::nullopt, std::move(bad), gen};
  if (truth_rows == n) inst.truth = PointCloud(std::move(truth));
  return inst;
}

void SaveInstance(const std::string& path, const ProblemInstance& inst) {
  auto out = OpenOut(path);
  WriteInstance(out, inst);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

ProblemInstance LoadInstance(const std::string& path) {
  auto in = OpenIn(path);
  return ReadInstance(in);
}

void WriteResult(std::ostream& out, const SolveReport& report) {
  out << "shapefit-result v1\n";
  for (int i = 0; i < report.locations.size(); ++i) {
    out << "t " << i;
    WriteRow(out, report.locations.point(i));
    out << '\n';
  }
  out << "meta iterations=" << report.iterations
      << " primal=" << FormatReal(report.final_primal_residual)
      << " dual=" << FormatReal(report.final_dual_residual)
      << " objective=" << FormatReal(report.objective)
      << " wall_seconds=" << FormatReal(report.wall_seconds) << '\n';
}

SolveReport ReadResult(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || Tokens(line) != std::vector<std::string>{
                                                    "shapefit-result", "v1"}) {
    ParseFail(line_no, "expected 'shapefit-result v1'");
  }
  std::vector<std::vector<double>> rows;
  std::optional<std::map<std::string, std::string>> meta;
  int meta_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = Tokens(line);
    if (toks.empty()) continue;
    if (toks[0] == "t") {
      if (toks.size() < 3) ParseFail(line_no, "truncated location line");
      if (ParseInt(toks[1], line_no) != static_cast<long long>(rows.size())) {
        ParseFail(line_no, "location lines must be in vertex order");
      }
      std::vector<double> r;
      for (std::size_t c = 2; c < toks.size(); ++c) {
        r.push_back(ParseReal(toks[c], line_no));
      }
      if (!rows.empty() && r.size() != rows.front().size()) {
        ParseFail(line_no, "inconsistent dimension");
      }
      rows.push_back(std::move(r));
    } else if (toks[0] == "meta") {
      meta = KeyValues(toks, 1, line_no);
      meta_line = line_no;
    } else {
      ParseFail(line_no, "unknown record '" + toks[0] + "'");
    }
  }
  if (!meta) ParseFail(line_no, "missing meta line");
  if (rows.size() < 2) ParseFail(line_no, "need at least 2 locations");

  Matrix pts(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          rows[i][c];
    }
  }
  SolveReport report{PointCloud(std::move(pts))};
  report.iterations = static_cast<int>(
      ParseInt(Require(*meta, "iterations", meta_line), meta_line));
  report.final_primal_residual =
      ParseReal(Require(*meta, "primal", meta_line), meta_line);
  report.final_dual_residual =
      ParseReal(Require(*meta, "dual", meta_line), meta_line);
  report.objective = ParseReal(Require(*meta, "objective", meta_line), meta_line);
  report.wall_seconds =
      ParseReal(Require(*meta, "wall_seconds", meta_line), meta_line);
  return report;
}

void SaveResult(const std::string& path, const SolveReport& report) {
  auto out = OpenOut(path);
  WriteResult(out, report);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

SolveReport LoadResult(const std::string& path) {
  auto in = OpenIn(path);
  return ReadResult(in);
}

}  // namespace shapefit
