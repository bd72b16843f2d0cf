// include/vadcal/ingest.h

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

// Readers and writers for the three on-disk artifacts:
//
//   RTTM        SPEAKER <session> <chan> <tbeg> <tdur> <NA> <NA> <name> <NA>
//               one segment per line, ';' starts a comment line.
//   scores CSV  header "time_s,score", one row per frame, times "%.6f".
//   manifest    JSON array of session records, see README.md.
//
// Writers emit a canonical form: serialize -> parse -> serialize is a
// byte-for-byte fixed point.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vadcal/types.h"

namespace vadcal {

using SpeakerMap = std::map<std::string, Role, std::less<>>;

/// Segments grouped per session, sorted, validated. total_duration of each
/// annotation is the last segment end until a bundle supplies the real length.
std::vector<SessionAnnotation> parse_rttm(std::istream &in,
                                          const SpeakerMap &speakers);
std::vector<SessionAnnotation> parse_rttm(std::string_view text,
                                          const SpeakerMap &speakers);
void write_rttm(std::ostream &out, const std::vector<SessionAnnotation> &sessions);

FrameScores parse_scores(std::istream &in, std::string session_id = {});
FrameScores parse_scores(std::string_view text, std::string session_id = {});
void write_scores(std::ostream &out, const FrameScores &scores);

/// One manifest record.
struct ManifestEntry {
  SessionMeta meta;
  std::string rttm_path;
  std::string scores_path;
  SpeakerMap speaker_map;
  std::optional<double> duration;  // "duration_s"

  friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> warnings;
};

/// Parses and validates a manifest. Patients below the inclusion severity
/// only produce a warning; everything else invalid throws.
Manifest load_manifest(std::string_view json_text);
std::string dump_manifest(const std::vector<ManifestEntry> &entries);

struct SessionBundle {
  SessionAnnotation annotation;
  FrameScores scores;
  SessionMeta meta;

  const std::string &session_id() const { return meta.session_id; }
  std::size_t n_frames() const { return scores.size(); }
  double hop() const { return scores.hop; }
  /// Throws on id mismatch (ValidationError) or when the score grid misses
  /// the annotation length by more than one hop (AlignmentError).
  void validate() const;
};

/// Builds a bundle. The annotation length is `duration` when given, the
/// score grid length otherwise.
SessionBundle assemble_bundle(SessionAnnotation annotation, FrameScores scores,
                              SessionMeta meta,
                              std::optional<double> duration = std::nullopt);

/// Reads the entry's files; relative paths resolve against base_dir.
SessionBundle load_bundle(const ManifestEntry &entry,
                          const std::filesystem::path &base_dir = {});

struct Cohort {
  std::vector<ManifestEntry> entries;
  std::vector<SessionBundle> bundles;
  std::vector<std::string> warnings;
};

/// Loads a manifest file and every bundle it names, using up to `jobs`
/// worker threads. Order follows the manifest.
Cohort load_cohort(const std::filesystem::path &manifest_path, unsigned jobs = 1);

std::string read_file(const std::filesystem::path &path);

}  // namespace vadcal
