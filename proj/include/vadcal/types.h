// include/vadcal/types.h

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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vadcal {

/// Default frame step of the score grid, in seconds.
inline constexpr double kDefaultHop = 0.01;

/// Half-open interval [start, end) in seconds.
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool contains(double t) const { return t >= start && t < end; }

  /// Throws ValidationError unless 0 <= start < end and both are finite.
  void validate() const;

  friend bool operator==(const TimeSpan &, const TimeSpan &) = default;
};

enum class Role : std::uint8_t { Clinician, Child };

std::string_view role_name(Role role);
/// Accepts "Clinician"/"Child" in any letter case; throws MappingError.
Role parse_role(std::string_view text);

/// Which roles' speech covers a frame center. Bit 0 clinician, bit 1 child.
enum class RoleCover : std::uint8_t { None = 0, Clinician = 1, Child = 2, Both = 3 };

inline RoleCover cover_of(Role role) {
  return role == Role::Clinician ? RoleCover::Clinician : RoleCover::Child;
}
inline RoleCover operator|(RoleCover a, RoleCover b) {
  return static_cast<RoleCover>(static_cast<std::uint8_t>(a) |
                                static_cast<std::uint8_t>(b));
}
inline bool covers(RoleCover cover, Role role) {
  return (static_cast<std::uint8_t>(cover) &
          static_cast<std::uint8_t>(cover_of(role))) != 0;
}

struct SpeechSegment {
  TimeSpan span;
  Role role = Role::Clinician;
  // Original annotation speaker name, kept so annotations re-serialize
  // exactly. Empty when the segment was built in memory.
  std::string speaker;

  friend bool operator==(const SpeechSegment &, const SpeechSegment &) = default;
};

/// Reference speech segments of one recording.
///
/// Segments are sorted by start time, lie within [0, total_duration] and
/// segments of the same role never overlap. Clinician and child speech may
/// overlap each other.
struct SessionAnnotation {
  std::string session_id;
  std::vector<SpeechSegment> segments;
  double total_duration = 0.0;

  /// Sorts segments by (start, end, role).
  void sort_segments();
  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const SessionAnnotation &,
                         const SessionAnnotation &) = default;
};

/// Posterior speech probabilities on a uniform grid; frame k covers
/// [k*hop, (k+1)*hop).
struct FrameScores {
  std::string session_id;
  double hop = kDefaultHop;
  std::vector<double> scores;

  std::size_t size() const { return scores.size(); }
  double duration() const { return static_cast<double>(scores.size()) * hop; }
  void validate() const;

  friend bool operator==(const FrameScores &, const FrameScores &) = default;
};

enum class Group : std::uint8_t { Patient, Control };

std::string_view group_name(Group group);
Group parse_group(std::string_view text);

/// CY-BOCS ratings: obsession and compulsion 0-20, total 0-40.
struct Severity {
  int obsession = 0;
  int compulsion = 0;
  int total = 0;

  friend bool operator==(const Severity &, const Severity &) = default;
};

/// Minimum total severity for trial inclusion; below it is only a warning.
inline constexpr int kInclusionSeverity = 16;

enum class SeverityBand { Subclinical, Moderate, Severe };
/// 16-23 moderate, 24-40 severe to extreme, lower is subclinical.
SeverityBand severity_band(int total);
std::string_view severity_band_name(SeverityBand band);

struct SessionMeta {
  std::string session_id;
  Group group = Group::Control;
  std::optional<Severity> severity;

  /// Ranges, additivity, and "controls carry no severity".
  void validate() const;

  friend bool operator==(const SessionMeta &, const SessionMeta &) = default;
};

enum class Label : std::uint8_t { NonSpeech = 0, Speech = 1 };

/// Frame-aligned speech labels, reference or predicted.
struct LabelSeq {
  double hop = kDefaultHop;
  std::vector<Label> labels;
  std::optional<std::vector<RoleCover>> role_labels;

  std::size_t size() const { return labels.size(); }
  std::size_t count_speech() const;

  friend bool operator==(const LabelSeq &, const LabelSeq &) = default;
};

}  // namespace vadcal
