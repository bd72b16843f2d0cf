// src/binarizer.cc

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

#include "vadcal/binarizer.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vadcal/error.h"
#include "vadcal/kernels.h"

namespace vadcal {

namespace {

constexpr double kDurationSlack = 1e-9;

bool shorter_than(std::size_t frames, double hop, double limit) {
  return static_cast<double>(frames) * hop + kDurationSlack < limit;
}

// Calls fn(begin, end) for every maximal run of `value` in labels.
template <typename Fn>
void for_each_run(const std::vector<Label> &labels, Label value, Fn fn) {
  std::size_t n = labels.size(), k = 0;
  while (k < n) {
    if (labels[k] != value) {
      ++k;
      continue;
    }
    std::size_t b = k;
    while (k < n && labels[k] == value) ++k;
    fn(b, k);
  }
}

}  // namespace

void PostProcessParams::validate() const {
  if (!(min_speech >= 0.0) || !(min_gap >= 0.0))
    throw DomainError("post-processing durations must be non-negative");
}

LabelSeq binarize(const FrameScores &scores, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    std::ostringstream os;
    os << "threshold " << threshold << " outside [0, 1]";
    throw DomainError(os.str());
  }
  LabelSeq out;
  out.hop = scores.hop;
  out.labels.resize(scores.size());
  kernels::threshold(scores.scores, threshold, out.labels);
  return out;
}

LabelSeq post_process(const LabelSeq &labels, const PostProcessParams &params) {
  params.validate();
  LabelSeq out = labels;
  auto &v = out.labels;
  const std::size_t n = v.size();
  if (params.min_gap > 0.0) {
    for_each_run(labels.labels, Label::NonSpeech, [&](std::size_t b, std::size_t e) {
      if (b > 0 && e < n && shorter_than(e - b, labels.hop, params.min_gap))
        std::fill(v.begin() + b, v.begin() + e, Label::Speech);
    });
  }
  if (params.min_speech > 0.0) {
    const std::vector<Label> filled = v;
    for_each_run(filled, Label::Speech, [&](std::size_t b, std::size_t e) {
      if (shorter_than(e - b, labels.hop, params.min_speech))
        std::fill(v.begin() + b, v.begin() + e, Label::NonSpeech);
    });
  }
  return out;
}

}  // namespace vadcal
