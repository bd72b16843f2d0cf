// src/ingest.cc

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

#include "vadcal/ingest.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vadcal/error.h"
#include "vadcal/parallel.h"

namespace vadcal {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kSpacingTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    std::size_t b = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k > b) out.push_back(line.substr(b, k - b));
  }
  return out;
}

bool to_double(std::string_view s, double &out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() &&
         std::isfinite(out);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Shortest fixed-notation text that parses back to exactly v.
std::string format_shortest(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

template <typename Fn>
void for_each_line(std::istream &in, Fn fn) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) fn(++no, std::string_view(line));
}

const ojson &require(const ojson &rec, const char *key, std::size_t index) {
  auto it = rec.find(key);
  if (it == rec.end())
    throw ValidationError("manifest entry " + std::to_string(index) +
                          ": missing key '" + key + "'");
  return *it;
}

std::string require_string(const ojson &rec, const char *key, std::size_t index) {
  const ojson &v = require(rec, key, index);
  if (!v.is_string())
    throw ValidationError("manifest entry " + std::to_string(index) + ": '" +
                          key + "' must be a string");
  return v.get<std::string>();
}

int require_int(const ojson &rec, const char *key, const std::string &where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number_integer())
    throw ValidationError(where + ": severity." + key + " must be an integer");
  return it->get<int>();
}

}  // namespace

// RTTM ------------------------------------------------------------------

std::vector<SessionAnnotation> parse_rttm(std::istream &in,
                                          const SpeakerMap &speakers) {
  std::map<std::string, SessionAnnotation> by_id;
  std::vector<std::string> order;
  for_each_line(in, [&](std::size_t no, std::string_view raw) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == ';') return;
    auto f = split_ws(line);
    if (f.size() < 9)
      throw ParseError("expected at least 9 fields, got " +
                       std::to_string(f.size()), no);
    if (f[0] != "SPEAKER")
      throw ParseError("unsupported record type '" + std::string(f[0]) + "'", no);
    double start = 0.0, dur = 0.0;
    if (!to_double(f[3], start))
      throw ParseError("bad onset '" + std::string(f[3]) + "'", no);
    if (!to_double(f[4], dur))
      throw ParseError("bad duration '" + std::string(f[4]) + "'", no);
    if (dur < 0.0)
      throw ValidationError("line " + std::to_string(no) + ": negative duration " +
                            std::string(f[4]));
    if (start < 0.0)
      throw ValidationError("line " + std::to_string(no) + ": negative onset " +
                            std::string(f[3]));
    auto role = speakers.find(f[7]);
    if (role == speakers.end())
      throw MappingError("line " + std::to_string(no) + ": speaker '" +
                         std::string(f[7]) + "' not in speaker map");
    std::string id(f[1]);
    auto [it, fresh] = by_id.try_emplace(id);
    if (fresh) {
      it->second.session_id = id;
      order.push_back(id);
    }
    SpeechSegment seg{{start, start + dur}, role->second, std::string(f[7])};
    try {
      seg.span.validate();
    } catch (const ValidationError &e) {
      throw ValidationError("line " + std::to_string(no) + ": " + e.what());
    }
    it->second.segments.push_back(std::move(seg));
  });

  std::vector<SessionAnnotation> out;
  for (const auto &id : order) {
    SessionAnnotation &a = by_id[id];
    a.sort_segments();
    for (const auto &s : a.segments)
      a.total_duration = std::max(a.total_duration, s.span.end);
    a.validate();
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<SessionAnnotation> parse_rttm(std::string_view text,
                                          const SpeakerMap &speakers) {
  std::istringstream in{std::string(text)};
  return parse_rttm(in, speakers);
}

void write_rttm(std::ostream &out, const std::vector<SessionAnnotation> &sessions) {
  for (const auto &a : sessions) {
    for (const auto &s : a.segments) {
      std::string name = s.speaker.empty() ? std::string(role_name(s.role)) : s.speaker;
      out << "SPEAKER " << a.session_id << " 1 " << format_fixed(s.span.start, 3)
          << ' ' << format_fixed(s.span.end - s.span.start, 3) << " <NA> <NA> "
          << name << " <NA>\n";
    }
  }
}

// Scores ----------------------------------------------------------------

FrameScores parse_scores(std::istream &in, std::string session_id) {
  FrameScores fs;
  fs.session_id = std::move(session_id);
  bool header = false;
  double t0 = 0.0, prev = 0.0;
  for_each_line(in, [&](std::size_t no, std::string_view raw) {
    std::string_view line = trim(raw);
    if (!header) {
      if (line != "time_s,score")
        throw FormatError("scores: line 1: expected header 'time_s,score'");
      header = true;
      return;
    }
    if (line.empty()) return;
    auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw FormatError("scores: line " + std::to_string(no) +
                        ": expected 'time,score'");
    double t = 0.0, s = 0.0;
    if (!to_double(trim(line.substr(0, comma)), t) ||
        !to_double(trim(line.substr(comma + 1)), s))
      throw FormatError("scores: line " + std::to_string(no) +
                        ": unparseable number");
    if (!(s >= 0.0 && s <= 1.0))
      throw RangeError("scores: line " + std::to_string(no) + ": score " +
                       std::string(trim(line.substr(comma + 1))) +
                       " outside [0, 1]");
    std::size_t k = fs.scores.size();
    if (k == 0) {
      if (std::abs(t) > kSpacingTolerance)
        throw FormatError("scores: line " + std::to_string(no) +
                          ": first frame must start at time 0");
      t0 = t;
    } else if (k == 1) {
      fs.hop = t - t0;
      if (!(fs.hop > kSpacingTolerance))
        throw FormatError("scores: line " + std::to_string(no) +
                          ": times must be strictly increasing");
    } else if (std::abs((t - prev) - fs.hop) > kSpacingTolerance) {
      throw FormatError("scores: line " + std::to_string(no) +
                        ": non-uniform spacing (" + format_fixed(t - prev, 6) +
                        " s vs hop " + format_fixed(fs.hop, 6) + " s)");
    }
    prev = t;
    fs.scores.push_back(s);
  });
  if (!header) throw FormatError("scores: empty input, expected header");
  if (fs.scores.size() < 2)
    throw FormatError("scores: need at least 2 rows to infer the hop");
  return fs;
}

FrameScores parse_scores(std::string_view text, std::string session_id) {
  std::istringstream in{std::string(text)};
  return parse_scores(in, std::move(session_id));
}

void write_scores(std::ostream &out, const FrameScores &scores) {
  out << "time_s,score\n";
  for (std::size_t k = 0; k < scores.scores.size(); ++k)
    out << format_fixed(static_cast<double>(k) * scores.hop, 6) << ','
        << format_shortest(scores.scores[k]) << '\n';
}

// Manifest --------------------------------------------------------------

Manifest load_manifest(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::parse_error &e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("manifest: top level must be an array");

  Manifest m;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const ojson &rec = doc[i];
    if (!rec.is_object())
      throw ValidationError("manifest entry " + std::to_string(i) +
                            ": must be an object");
    ManifestEntry e;
    e.meta.session_id = require_string(rec, "session_id", i);
    if (e.meta.session_id.empty())
      throw ValidationError("manifest entry " + std::to_string(i) +
                            ": empty session_id");
    if (!seen.insert(e.meta.session_id).second)
      throw DuplicateIdError("manifest: duplicate session_id '" +
                             e.meta.session_id + "'");
    const std::string where = "session '" + e.meta.session_id + "'";
    e.meta.group = parse_group(require_string(rec, "group", i));
    e.rttm_path = require_string(rec, "rttm_path", i);
    e.scores_path = require_string(rec, "scores_path", i);

    const ojson &smap = require(rec, "speaker_map", i);
    if (!smap.is_object())
      throw ValidationError(where + ": speaker_map must be an object");
    for (const auto &[name, role] : smap.items()) {
      if (!role.is_string())
        throw ValidationError(where + ": speaker_map values must be strings");
      e.speaker_map.emplace(name, parse_role(role.get<std::string>()));
    }

    if (auto it = rec.find("duration_s"); it != rec.end() && !it->is_null()) {
      if (!it->is_number() || !(it->get<double>() > 0.0))
        throw ValidationError(where + ": duration_s must be a positive number");
      e.duration = it->get<double>();
    }

    if (auto it = rec.find("severity"); it != rec.end() && !it->is_null()) {
      if (!it->is_object())
        throw ValidationError(where + ": severity must be an object");
      e.meta.severity = Severity{require_int(*it, "obsession", where),
                                 require_int(*it, "compulsion", where),
                                 require_int(*it, "total", where)};
    }
    e.meta.validate();
    if (e.meta.group == Group::Patient && e.meta.severity &&
        e.meta.severity->total < kInclusionSeverity)
      m.warnings.push_back(where + ": patient severity " +
                           std::to_string(e.meta.severity->total) +
                           " below inclusion threshold " +
                           std::to_string(kInclusionSeverity));
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::string dump_manifest(const std::vector<ManifestEntry> &entries) {
  ojson doc = ojson::array();
  for (const auto &e : entries) {
    ojson rec;
    rec["session_id"] = e.meta.session_id;
    rec["group"] = group_name(e.meta.group);
    rec["rttm_path"] = e.rttm_path;
    rec["scores_path"] = e.scores_path;
    if (e.duration) rec["duration_s"] = *e.duration;
    if (e.meta.severity)
      rec["severity"] = {{"obsession", e.meta.severity->obsession},
                         {"compulsion", e.meta.severity->compulsion},
                         {"total", e.meta.severity->total}};
    ojson smap = ojson::object();
    for (const auto &[name, role] : e.speaker_map) smap[name] = role_name(role);
    rec["speaker_map"] = std::move(smap);
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

// Bundles ---------------------------------------------------------------

void SessionBundle::validate() const {
  if (annotation.session_id != meta.session_id ||
      scores.session_id != meta.session_id)
    throw ValidationError("bundle ids disagree: annotation '" +
                          annotation.session_id + "', scores '" +
                          scores.session_id + "', meta '" + meta.session_id + "'");
  scores.validate();
  annotation.validate();
  meta.validate();
  double grid = scores.duration();
  double slack = 1e-9 * std::max(1.0, annotation.total_duration);
  if (std::abs(grid - annotation.total_duration) > scores.hop + slack) {
    std::ostringstream os;
    os << "session '" << meta.session_id << "': score grid covers " << grid
       << " s (" << scores.size() << " frames x " << scores.hop
       << " s) but annotation length is " << annotation.total_duration << " s";
    throw AlignmentError(os.str());
  }
}

SessionBundle assemble_bundle(SessionAnnotation annotation, FrameScores scores,
                              SessionMeta meta, std::optional<double> duration) {
  annotation.session_id = meta.session_id;
  scores.session_id = meta.session_id;
  if (duration) {
    annotation.total_duration = *duration;
  } else {
    double grid = scores.duration();
    double last_end = annotation.total_duration;
    if (last_end > grid + scores.hop + 1e-9 * std::max(1.0, grid)) {
      std::ostringstream os;
      os << "session '" << meta.session_id << "': annotation reaches "
         << last_end << " s beyond score grid " << grid << " s";
      throw AlignmentError(os.str());
    }
    annotation.total_duration = std::max(grid, last_end);
  }
  SessionBundle b{std::move(annotation), std::move(scores), std::move(meta)};
  b.validate();
  return b;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SessionBundle load_bundle(const ManifestEntry &entry,
                          const std::filesystem::path &base_dir) {
  auto resolve = [&](const std::string &p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  const std::string &id = entry.meta.session_id;
  auto annotations = parse_rttm(read_file(resolve(entry.rttm_path)), entry.speaker_map);
  SessionAnnotation annotation;
  annotation.session_id = id;
  for (auto &a : annotations)
    if (a.session_id == id) annotation = std::move(a);
  FrameScores scores = parse_scores(read_file(resolve(entry.scores_path)), id);
  return assemble_bundle(std::move(annotation), std::move(scores), entry.meta,
                         entry.duration);
}

Cohort load_cohort(const std::filesystem::path &manifest_path, unsigned jobs) {
  Manifest m = load_manifest(read_file(manifest_path));
  Cohort c;
  c.warnings = std::move(m.warnings);
  c.bundles.resize(m.entries.size());
  const auto base = manifest_path.parent_path();
  parallel_for(m.entries.size(), jobs,
               [&](std::size_t i) { c.bundles[i] = load_bundle(m.entries[i], base); });
  c.entries = std::move(m.entries);
  return c;
}

}  // namespace vadcal
