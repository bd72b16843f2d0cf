// include/vadcal/timeline.h

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

#include <cstddef>
#include <optional>
#include <vector>

#include "vadcal/types.h"

namespace vadcal {

/// Half-open frame index range [begin, end).
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const FrameRange &, const FrameRange &) = default;
};

/// Center time of frame k on a grid with the given hop.
inline double frame_center(std::size_t k, double hop) {
  return (static_cast<double>(k) + 0.5) * hop;
}

/// Frames whose center lies inside span, clipped to [0, n_frames).
FrameRange frames_in(const TimeSpan &span, double hop, std::size_t n_frames);

/// Labels frame k Speech iff its center falls inside a segment matching
/// role_filter (any segment when absent). role_labels always records every
/// role covering the center, independent of the filter.
///
/// Throws AlignmentError when n_frames*hop exceeds the annotation length by
/// more than one frame, DomainError when hop <= 0.
LabelSeq frame_labels(const SessionAnnotation &annotation, double hop,
                      std::size_t n_frames,
                      std::optional<Role> role_filter = std::nullopt);

/// Consecutive windows [i*L, (i+1)*L). A trailing partial window is kept
/// when it is at least half a window long, and then ends at total_duration.
std::vector<TimeSpan> window_bounds(double total_duration, double window_len);

}  // namespace vadcal
