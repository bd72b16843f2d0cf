// src/timeline.cc

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

#include "vadcal/timeline.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <tuple>

#include "vadcal/error.h"

namespace vadcal {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Smallest k >= 0 whose frame center is >= t. The closed form is only a
// starting guess; the loops make the result agree with frame_center exactly.
std::size_t first_center_at_or_after(double t, double hop) {
  double guess = std::ceil(t / hop - 0.5);
  std::size_t k = guess <= 0.0 ? 0 : static_cast<std::size_t>(guess);
  while (k > 0 && frame_center(k - 1, hop) >= t) --k;
  while (frame_center(k, hop) < t) ++k;
  return k;
}

}  // namespace

void TimeSpan::validate() const {
  if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0 ||
      !(end > start)) {
    std::ostringstream os;
    os << "invalid time span [" << start << ", " << end << ")";
    throw ValidationError(os.str());
  }
}

std::string_view role_name(Role role) {
  return role == Role::Clinician ? "Clinician" : "Child";
}

Role parse_role(std::string_view text) {
  if (iequals(text, "Clinician")) return Role::Clinician;
  if (iequals(text, "Child")) return Role::Child;
  throw MappingError("unknown role '" + std::string(text) + "'");
}

std::string_view group_name(Group group) {
  return group == Group::Patient ? "Patient" : "Control";
}

Group parse_group(std::string_view text) {
  if (iequals(text, "Patient")) return Group::Patient;
  if (iequals(text, "Control")) return Group::Control;
  throw ValidationError("unknown group '" + std::string(text) + "'");
}

SeverityBand severity_band(int total) {
  if (total >= 24) return SeverityBand::Severe;
  if (total >= kInclusionSeverity) return SeverityBand::Moderate;
  return SeverityBand::Subclinical;
}

std::string_view severity_band_name(SeverityBand band) {
  switch (band) {
    case SeverityBand::Moderate: return "moderate";
    case SeverityBand::Severe: return "severe";
    default: return "subclinical";
  }
}

void SessionAnnotation::sort_segments() {
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SpeechSegment &a, const SpeechSegment &b) {
                     return std::tie(a.span.start, a.span.end, a.role) <
                            std::tie(b.span.start, b.span.end, b.role);
                   });
}

void SessionAnnotation::validate() const {
  if (!std::isfinite(total_duration) || total_duration < 0.0)
    throw ValidationError("session '" + session_id +
                          "': invalid total duration");
  double last_end[2] = {-1.0, -1.0};
  double prev_start = 0.0;
  for (const auto &seg : segments) {
    seg.span.validate();
    if (seg.span.start < prev_start)
      throw ValidationError("session '" + session_id +
                            "': segments not sorted by start time");
    prev_start = seg.span.start;
    if (seg.span.end > total_duration + 1e-9) {
      std::ostringstream os;
      os << "session '" << session_id << "': segment ends at "
         << seg.span.end << " s beyond total duration " << total_duration
         << " s";
      throw ValidationError(os.str());
    }
    auto r = static_cast<std::size_t>(seg.role);
    if (seg.span.start < last_end[r]) {
      std::ostringstream os;
      os << "session '" << session_id << "': overlapping "
         << role_name(seg.role) << " segments at " << seg.span.start << " s";
      throw ValidationError(os.str());
    }
    last_end[r] = seg.span.end;
  }
}

void FrameScores::validate() const {
  if (!(hop > 0.0) || !std::isfinite(hop))
    throw DomainError("session '" + session_id + "': hop must be positive");
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!(scores[k] >= 0.0 && scores[k] <= 1.0)) {
      std::ostringstream os;
      os << "session '" << session_id << "': score " << scores[k]
         << " at frame " << k << " outside [0, 1]";
      throw RangeError(os.str());
    }
  }
}

void SessionMeta::validate() const {
  if (!severity) return;
  if (group == Group::Control)
    throw ValidationError("session '" + session_id +
                          "': control sessions carry no severity score");
  const Severity &s = *severity;
  auto check = [&](int v, int hi, const char *name) {
    if (v < 0 || v > hi)
      throw ValidationError("session '" + session_id + "': " + name + " " +
                            std::to_string(v) + " outside [0, " +
                            std::to_string(hi) + "]");
  };
  check(s.obsession, 20, "obsession");
  check(s.compulsion, 20, "compulsion");
  check(s.total, 40, "total");
  if (s.total != s.obsession + s.compulsion)
    throw ValidationError("session '" + session_id + "': total " +
                          std::to_string(s.total) + " != obsession + compulsion " +
                          std::to_string(s.obsession + s.compulsion));
}

std::size_t LabelSeq::count_speech() const {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), Label::Speech));
}

FrameRange frames_in(const TimeSpan &span, double hop, std::size_t n_frames) {
  std::size_t b = std::min(first_center_at_or_after(span.start, hop), n_frames);
  std::size_t e = std::min(first_center_at_or_after(span.end, hop), n_frames);
  return {b, std::max(b, e)};
}

LabelSeq frame_labels(const SessionAnnotation &annotation, double hop,
                      std::size_t n_frames, std::optional<Role> role_filter) {
  if (!(hop > 0.0)) throw DomainError("frame_labels: hop must be positive");
  double grid = static_cast<double>(n_frames) * hop;
  double slack = 1e-9 * std::max(1.0, annotation.total_duration);
  if (grid > annotation.total_duration + hop + slack) {
    std::ostringstream os;
    os << "session '" << annotation.session_id << "': frame grid of "
       << n_frames << " x " << hop << " s = " << grid
       << " s exceeds annotation length " << annotation.total_duration
       << " s by more than one frame";
    throw AlignmentError(os.str());
  }

  LabelSeq out;
  out.hop = hop;
  out.labels.assign(n_frames, Label::NonSpeech);
  std::vector<RoleCover> cover(n_frames, RoleCover::None);
  for (const auto &seg : annotation.segments) {
    FrameRange r = frames_in(seg.span, hop, n_frames);
    bool counted = !role_filter || *role_filter == seg.role;
    for (std::size_t k = r.begin; k < r.end; ++k) {
      cover[k] = cover[k] | cover_of(seg.role);
      if (counted) out.labels[k] = Label::Speech;
    }
  }
  out.role_labels = std::move(cover);
  return out;
}

std::vector<TimeSpan> window_bounds(double total_duration, double window_len) {
  if (!(window_len > 0.0))
    throw DomainError("window_bounds: window length must be positive");
  std::vector<TimeSpan> out;
  if (!(total_duration > 0.0)) return out;
  double ratio = total_duration / window_len;
  auto n_full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  for (std::size_t i = 0; i < n_full; ++i)
    out.push_back({static_cast<double>(i) * window_len,
                   static_cast<double>(i + 1) * window_len});
  double tail_start = static_cast<double>(n_full) * window_len;
  double remainder = total_duration - tail_start;
  if (remainder > 1e-9 * window_len && remainder >= 0.5 * window_len)
    out.push_back({tail_start, total_duration});
  return out;
}

}  // namespace vadcal
