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

#ifndef SHAPEFIT_RNG_HPP_
#define SHAPEFIT_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace shapefit {

// SplitMix64 finalizer. Used to seed Rng and to derive per-task seeds.
std::uint64_t Mix64(std::uint64_t x);

// FNV-1a over the bytes of a string, passed through Mix64.
std::uint64_t Hash64(std::string_view s);

// xoshiro256** seeded from a single 64-bit value through SplitMix64.
// Bit-identical output on every platform for a given seed.
//
//   Uniform(): top 53 bits of Next() scaled by 2^-53, in [0, 1).
//   Normal():  Box-Muller on (1 - Uniform(), Uniform()); both outputs of a
//              pair are used, cosine branch first.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next();
  double Uniform();
  double Normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace shapefit

#endif  // SHAPEFIT_RNG_HPP_
