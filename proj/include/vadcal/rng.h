// include/vadcal/rng.h

// Copyright 2026 The vadcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace vadcal {

/// splitmix64 step (Steele, Lea, Flood); also used to expand seeds.
std::uint64_t splitmix64(std::uint64_t &state);

/// xoshiro256** 1.0 (Blackman, Vigna) with the reference constants, seeded
/// by four splitmix64 outputs. All derived distributions below are written
/// out explicitly so a sequence can be reproduced from any language.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Top 53 bits scaled to [0, 1).
  double uniform();
  /// (0, 1): uniform() redrawn while it is 0.
  double uniform_open();
  /// Marsaglia polar method; the second variate is discarded.
  double normal();
  double exponential(double mean);
  /// Marsaglia-Tsang squeeze; shape < 1 boosted via G(shape+1)*U^(1/shape).
  double gamma(double shape);
  /// G(a) / (G(a) + G(b)).
  double beta(double a, double b);

 private:
  std::uint64_t s_[4];
};

}  // namespace vadcal
