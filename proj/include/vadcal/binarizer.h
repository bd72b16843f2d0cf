// include/vadcal/binarizer.h

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

#include "vadcal/types.h"

namespace vadcal {

/// Morphological clean-up of predicted labels. Zero disables a step.
struct PostProcessParams {
  double min_speech = 0.0;  // seconds; shorter speech runs are removed
  double min_gap = 0.0;     // seconds; shorter interior gaps are filled

  bool enabled() const { return min_speech > 0.0 || min_gap > 0.0; }
  void validate() const;
};

/// Frame is Speech iff score > threshold (strict, so th = 1 predicts no
/// speech at all). Throws DomainError for threshold outside [0, 1].
LabelSeq binarize(const FrameScores &scores, double threshold);

/// Fills non-speech gaps shorter than min_gap that have speech on both
/// sides, then drops speech runs shorter than min_speech. The order is
/// fixed; the operation is idempotent.
LabelSeq post_process(const LabelSeq &labels, const PostProcessParams &params);

}  // namespace vadcal
