// include/vadcal/metrics.h

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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vadcal/binarizer.h"
#include "vadcal/ingest.h"
#include "vadcal/kernels.h"
#include "vadcal/timeline.h"
#include "vadcal/types.h"

namespace vadcal {

/// Frame counts behind FNR/FPR. Counts are canonical; seconds are count*hop.
struct ConfusionCounts {
  std::uint64_t fn_frames = 0;   // true speech predicted non-speech
  std::uint64_t fp_frames = 0;   // true non-speech predicted speech
  std::uint64_t true_speech_frames = 0;
  std::uint64_t true_nonspeech_frames = 0;
  double hop = kDefaultHop;

  static ConfusionCounts from(const kernels::Counts &c, double hop) {
    return {c.fn, c.fp, c.true_speech, c.true_nonspeech, hop};
  }
  std::uint64_t evaluated_frames() const {
    return true_speech_frames + true_nonspeech_frames;
  }
  double fn_seconds() const { return static_cast<double>(fn_frames) * hop; }
  double fp_seconds() const { return static_cast<double>(fp_frames) * hop; }

  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    fn_frames += o.fn_frames;
    fp_frames += o.fp_frames;
    true_speech_frames += o.true_speech_frames;
    true_nonspeech_frames += o.true_nonspeech_frames;
    return *this;
  }
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// FNR = fn / true speech, FPR = fp / true non-speech. A rate is empty
/// (undefined) when its denominator is zero; it is never reported as 0.
struct RateReport {
  std::string session_id;
  std::optional<double> fnr;
  std::optional<double> fpr;
  ConfusionCounts counts;
  std::optional<TimeSpan> window;
  std::optional<std::size_t> window_index;
  std::optional<Role> role_filter;
  double threshold = 0.5;

  bool undefined() const { return !fnr || !fpr; }
};

/// Per-frame truth classes for a speaker filter. Without a filter every
/// reference Speech frame is true speech. With filter P, frames covered by P
/// are true speech, frames with nobody speaking are true non-speech and
/// frames covered only by the other role are excluded from both.
std::vector<Truth> truth_classes(const LabelSeq &ref, std::optional<Role> role_filter);
std::vector<Truth> truth_classes(std::span<const RoleCover> cover,
                                 std::optional<Role> role_filter);

/// Throws AlignmentError on length/hop mismatch, DomainError when a filter
/// is requested but ref carries no role labels.
ConfusionCounts confusion(const LabelSeq &ref, const LabelSeq &pred,
                          std::optional<Role> role_filter = std::nullopt);

RateReport rates(const ConfusionCounts &counts);

/// A bundle with its frame truth and window layout computed once, for
/// repeated evaluation at many thresholds.
class PreparedSession {
 public:
  PreparedSession(const SessionBundle &bundle, double window_len);

  const SessionBundle &bundle() const { return *bundle_; }
  const std::vector<TimeSpan> &windows() const { return windows_; }
  const std::vector<FrameRange> &window_frames() const { return ranges_; }
  std::span<const RoleCover> cover() const { return cover_; }
  std::span<const Truth> truth(std::optional<Role> role_filter) const;

  /// Counts over the frames of one window, score > threshold predicts speech.
  ConfusionCounts count(std::size_t window, double threshold,
                        std::optional<Role> role_filter = std::nullopt) const;
  /// Counts over the whole session.
  ConfusionCounts count_all(double threshold,
                            std::optional<Role> role_filter = std::nullopt) const;
  /// Counts of given predicted labels over one window.
  ConfusionCounts count_labels(std::size_t window, const LabelSeq &pred,
                               std::optional<Role> role_filter = std::nullopt) const;

 private:
  static std::size_t slot(std::optional<Role> r) {
    return r ? 1 + static_cast<std::size_t>(*r) : 0;
  }

  const SessionBundle *bundle_;
  std::vector<RoleCover> cover_;
  std::array<std::vector<Truth>, 3> truth_;
  std::vector<TimeSpan> windows_;
  std::vector<FrameRange> ranges_;
};

/// One report per window from window_bounds, undefined windows included.
std::vector<RateReport> windowed_rates(const PreparedSession &session, double threshold,
                                       std::optional<Role> role_filter = std::nullopt,
                                       const PostProcessParams &post = {});
std::vector<RateReport> windowed_rates(const SessionBundle &bundle, double threshold,
                                       double window_len,
                                       std::optional<Role> role_filter = std::nullopt,
                                       const PostProcessParams &post = {});

/// Rate over all frames of the session (no windowing).
RateReport session_rates(const PreparedSession &session, double threshold,
                         std::optional<Role> role_filter = std::nullopt,
                         const PostProcessParams &post = {});

/// Sum of counts, re-rated. Report metadata other than counts is dropped.
RateReport pool(std::span<const RateReport> reports);

}  // namespace vadcal
