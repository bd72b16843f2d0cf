// src/metrics.cc

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

#include "vadcal/metrics.h"

#include <cmath>

#include "vadcal/error.h"

namespace vadcal {

std::vector<Truth> truth_classes(std::span<const RoleCover> cover,
                                 std::optional<Role> role_filter) {
  std::vector<Truth> out(cover.size());
  for (std::size_t k = 0; k < cover.size(); ++k) {
    if (cover[k] == RoleCover::None)
      out[k] = Truth::NonSpeech;
    else if (!role_filter || covers(cover[k], *role_filter))
      out[k] = Truth::Speech;
    else
      out[k] = Truth::Excluded;
  }
  return out;
}

std::vector<Truth> truth_classes(const LabelSeq &ref, std::optional<Role> role_filter) {
  if (role_filter) {
    if (!ref.role_labels)
      throw DomainError("role-filtered counts need reference role labels");
    if (ref.role_labels->size() != ref.size())
      throw AlignmentError("reference role labels and labels differ in length");
    return truth_classes(*ref.role_labels, role_filter);
  }
  std::vector<Truth> out(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k)
    out[k] = ref.labels[k] == Label::Speech ? Truth::Speech : Truth::NonSpeech;
  return out;
}

ConfusionCounts confusion(const LabelSeq &ref, const LabelSeq &pred,
                          std::optional<Role> role_filter) {
  if (ref.size() != pred.size())
    throw AlignmentError("confusion: reference has " + std::to_string(ref.size()) +
                         " frames, prediction " + std::to_string(pred.size()));
  if (std::abs(ref.hop - pred.hop) > 1e-12)
    throw AlignmentError("confusion: reference and prediction hops differ");
  auto truth = truth_classes(ref, role_filter);
  return ConfusionCounts::from(kernels::count_labels(truth, pred.labels), ref.hop);
}

RateReport rates(const ConfusionCounts &c) {
  RateReport r;
  r.counts = c;
  if (c.true_speech_frames > 0)
    r.fnr = static_cast<double>(c.fn_frames) / static_cast<double>(c.true_speech_frames);
  if (c.true_nonspeech_frames > 0)
    r.fpr = static_cast<double>(c.fp_frames) /
            static_cast<double>(c.true_nonspeech_frames);
  return r;
}

PreparedSession::PreparedSession(const SessionBundle &bundle, double window_len)
    : bundle_(&bundle) {
  const std::size_t n = bundle.n_frames();
  LabelSeq ref = frame_labels(bundle.annotation, bundle.hop(), n);
  cover_ = std::move(*ref.role_labels);
  truth_[0] = truth_classes(cover_, std::nullopt);
  truth_[1] = truth_classes(cover_, Role::Clinician);
  truth_[2] = truth_classes(cover_, Role::Child);
  windows_ = window_bounds(bundle.annotation.total_duration, window_len);
  for (const auto &w : windows_) ranges_.push_back(frames_in(w, bundle.hop(), n));
}

std::span<const Truth> PreparedSession::truth(std::optional<Role> role_filter) const {
  return truth_[slot(role_filter)];
}

ConfusionCounts PreparedSession::count(std::size_t window, double threshold,
                                       std::optional<Role> role_filter) const {
  const FrameRange &r = ranges_.at(window);
  std::span<const double> scores(bundle_->scores.scores);
  auto c = kernels::count_scores(scores.subspan(r.begin, r.size()),
                                 truth(role_filter).subspan(r.begin, r.size()),
                                 threshold);
  return ConfusionCounts::from(c, bundle_->hop());
}

ConfusionCounts PreparedSession::count_all(double threshold,
                                           std::optional<Role> role_filter) const {
  auto c = kernels::count_scores(bundle_->scores.scores, truth(role_filter), threshold);
  return ConfusionCounts::from(c, bundle_->hop());
}

ConfusionCounts PreparedSession::count_labels(std::size_t window, const LabelSeq &pred,
                                              std::optional<Role> role_filter) const {
  if (pred.size() != bundle_->n_frames())
    throw AlignmentError("prediction length differs from session frame count");
  const FrameRange &r = ranges_.at(window);
  std::span<const Label> labels(pred.labels);
  auto c = kernels::count_labels(truth(role_filter).subspan(r.begin, r.size()),
                                 labels.subspan(r.begin, r.size()));
  return ConfusionCounts::from(c, bundle_->hop());
}

std::vector<RateReport> windowed_rates(const PreparedSession &session, double threshold,
                                       std::optional<Role> role_filter,
                                       const PostProcessParams &post) {
  std::optional<LabelSeq> pred;
  if (post.enabled())
    pred = post_process(binarize(session.bundle().scores, threshold), post);
  else if (!(threshold >= 0.0 && threshold <= 1.0))
    throw DomainError("threshold outside [0, 1]");

  std::vector<RateReport> out;
  out.reserve(session.windows().size());
  for (std::size_t w = 0; w < session.windows().size(); ++w) {
    ConfusionCounts c = pred ? session.count_labels(w, *pred, role_filter)
                             : session.count(w, threshold, role_filter);
    RateReport r = rates(c);
    r.session_id = session.bundle().session_id();
    r.window = session.windows()[w];
    r.window_index = w;
    r.role_filter = role_filter;
    r.threshold = threshold;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RateReport> windowed_rates(const SessionBundle &bundle, double threshold,
                                       double window_len, std::optional<Role> role_filter,
                                       const PostProcessParams &post) {
  PreparedSession session(bundle, window_len);
  return windowed_rates(session, threshold, role_filter, post);
}

RateReport session_rates(const PreparedSession &session, double threshold,
                         std::optional<Role> role_filter,
                         const PostProcessParams &post) {
  ConfusionCounts c;
  if (post.enabled()) {
    auto pred = post_process(binarize(session.bundle().scores, threshold), post);
    c = ConfusionCounts::from(kernels::count_labels(session.truth(role_filter), pred.labels),
                              session.bundle().hop());
  } else {
    if (!(threshold >= 0.0 && threshold <= 1.0))
      throw DomainError("threshold outside [0, 1]");
    c = session.count_all(threshold, role_filter);
  }
  RateReport r = rates(c);
  r.session_id = session.bundle().session_id();
  r.role_filter = role_filter;
  r.threshold = threshold;
  return r;
}

RateReport pool(std::span<const RateReport> reports) {
  ConfusionCounts total;
  if (!reports.empty()) total.hop = reports.front().counts.hop;
  for (const auto &r : reports) total += r.counts;
  return rates(total);
}

}  // namespace vadcal
