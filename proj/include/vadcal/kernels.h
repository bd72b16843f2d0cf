// include/vadcal/kernels.h

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

// Frame-level inner loops. Every kernel exists as a portable scalar
// reference and an AVX2 variant; the public entry points dispatch to the
// best variant the running CPU supports. Both variants must produce
// identical results for every input; tests/unit/kernels_test.cc holds them
// to that.
//
// Setting VADCAL_ISA=scalar in the environment pins dispatch to the scalar
// reference (read once, on first use).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "vadcal/types.h"

namespace vadcal {

/// Ground-truth class of a frame under a given speaker filter.
enum class Truth : std::uint8_t { Excluded = 0, Speech = 1, NonSpeech = 2 };

namespace kernels {

/// Integer confusion counts. fn: true speech predicted non-speech,
/// fp: true non-speech predicted speech.
struct Counts {
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t true_speech = 0;
  std::uint64_t true_nonspeech = 0;

  Counts &operator+=(const Counts &o) {
    fn += o.fn;
    fp += o.fp;
    true_speech += o.true_speech;
    true_nonspeech += o.true_nonspeech;
    return *this;
  }
  friend bool operator==(const Counts &, const Counts &) = default;
};

enum class Isa { Scalar, Avx2 };

Isa active_isa();
std::string_view isa_name(Isa isa);

/// out[k] = Speech iff scores[k] > threshold. Sizes must match.
void threshold(std::span<const double> scores, double threshold,
               std::span<Label> out);

/// Fused threshold-and-count: frame k is predicted Speech iff
/// scores[k] > threshold and is counted against truth[k].
Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double threshold);

/// Counts predicted labels against truth classes.
Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred);

namespace scalar {
void threshold(std::span<const double> scores, double threshold,
               std::span<Label> out);
Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double threshold);
Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred);
}  // namespace scalar

namespace avx2 {
/// True when compiled for x86-64 and the running CPU reports AVX2 and POPCNT.
/// The functions below must only be called when this returns true.
bool supported();
void threshold(std::span<const double> scores, double threshold,
               std::span<Label> out);
Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double threshold);
Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred);
}  // namespace avx2

}  // namespace kernels
}  // namespace vadcal
