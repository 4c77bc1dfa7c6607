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

#ifndef SHAPEFIT_IO_HPP_
#define SHAPEFIT_IO_HPP_

#include <iosfwd>
#include <string>

#include "shapefit/model.hpp"

namespace shapefit {

// printf("%.17g"), except NaN -> "NaN" and infinities -> "inf" / "-inf".
std::string FormatReal(double x);

// Instance file, line oriented:
//
//   shapefit-instance v1 d=<d> n=<n> m=<m>
//   e <i> <j> <v_1> ... <v_d>          m lines, 0-based i < j
//   t <i> <x_1> ... <x_d>              optional, n lines in vertex order
//   cameras <i> <i> ...                optional, bipartite camera vertices
//   bad <k> <k> ...                    optional, corrupted edge indices
//   gen p=<p> q=<q> sigma=<s> seed=<u64>   optional
//
// Reals are written with 17 significant digits, so a write/read round trip
// is exact.
void WriteInstance(std::ostream& out, const ProblemInstance& inst);
ProblemInstance ReadInstance(std::istream& in);

void SaveInstance(const std::string& path, const ProblemInstance& inst);
ProblemInstance LoadInstance(const std::string& path);

// Result file:
//
//   shapefit-result v1
//   t <i> <x_1> ... <x_d>              n lines
//   meta iterations=<k> primal=<r> dual=<r> objective=<o> wall_seconds=<s>
void WriteResult(std::ostream& out, const SolveReport& report);
SolveReport ReadResult(std::istream& in);

void SaveResult(const std::string& path, const SolveReport& report);
SolveReport LoadResult(const std::string& path);

}  // namespace shapefit

#endif  // SHAPEFIT_IO_HPP_
