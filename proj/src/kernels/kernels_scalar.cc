// src/kernels/kernels_scalar.cc

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

#include "vadcal/kernels.h"

namespace vadcal::kernels::scalar {

void threshold(std::span<const double> scores, double th,
               std::span<Label> out) {
  for (std::size_t k = 0; k < scores.size(); ++k)
    out[k] = scores[k] > th ? Label::Speech : Label::NonSpeech;
}

Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double th) {
  Counts c;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    bool pred = scores[k] > th;
    switch (truth[k]) {
      case Truth::Speech:
        ++c.true_speech;
        c.fn += !pred;
        break;
      case Truth::NonSpeech:
        ++c.true_nonspeech;
        c.fp += pred;
        break;
      default:
        break;
    }
  }
  return c;
}

Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred) {
  Counts c;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    bool speech = pred[k] == Label::Speech;
    switch (truth[k]) {
      case Truth::Speech:
        ++c.true_speech;
        c.fn += !speech;
        break;
      case Truth::NonSpeech:
        ++c.true_nonspeech;
        c.fp += speech;
        break;
      default:
        break;
    }
  }
  return c;
}

}  // namespace vadcal::kernels::scalar
