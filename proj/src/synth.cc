// src/synth.cc

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

#include "vadcal/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vadcal/error.h"
#include "vadcal/parallel.h"
#include "vadcal/rng.h"
#include "vadcal/timeline.h"

namespace vadcal {

namespace {

using ojson = nlohmann::ordered_json;

// Turn boundaries live on a 1 ms grid so RTTM text round-trips exactly.
double quantize(double t) { return std::round(t * 1000.0) / 1000.0; }

double sample_length(Rng &rng, const LengthDist &d) {
  return std::clamp(d.min + rng.exponential(d.mean - d.min), d.min, d.max);
}

void check_length(const LengthDist &d, const std::string &what) {
  if (!(d.min >= 0.0) || d.min > d.max || d.mean < d.min || d.mean > d.max)
    throw ConfigError(what + ": need 0 <= min <= mean <= max");
}

void check_beta(const BetaParams &b, const std::string &what) {
  if (!(b.alpha > 0.0) || !(b.beta > 0.0))
    throw ConfigError(what + ": Beta parameters must be positive");
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LengthDist length_from(const ojson &j, LengthDist d) {
  d.mean = j.value("mean", d.mean);
  d.min = j.value("min", d.min);
  d.max = j.value("max", d.max);
  return d;
}

BetaParams beta_from(const ojson &j, BetaParams d) {
  if (j.contains("mean"))
    return BetaParams::from_mean(j.at("mean").get<double>(),
                                 j.value("concentration", d.alpha + d.beta));
  d.alpha = j.value("alpha", d.alpha);
  d.beta = j.value("beta", d.beta);
  return d;
}

ojson to_json(const LengthDist &d) {
  return {{"mean", d.mean}, {"min", d.min}, {"max", d.max}};
}
ojson to_json(const BetaParams &b) { return {{"alpha", b.alpha}, {"beta", b.beta}}; }

}  // namespace

void SynthConfig::validate() const {
  const std::string where = "synth config '" + session_id + "'";
  if (session_id.empty()) throw ConfigError("synth config: empty session_id");
  if (!(duration > 0.0)) throw ConfigError(where + ": duration must be positive");
  if (!(hop > 0.0) || hop > duration) throw ConfigError(where + ": invalid hop");
  check_length(clinician_turn, where + " clinician_turn");
  check_length(child_turn, where + " child_turn");
  check_length(gap, where + " gap");
  if (!(clinician_turn.max > 0.0) || !(child_turn.max > 0.0))
    throw ConfigError(where + ": turn lengths must allow positive durations");
  check_beta(clinician_speech, where + " clinician_speech");
  check_beta(child_speech, where + " child_speech");
  check_beta(nonspeech, where + " nonspeech");
  if (!(overlap_prob >= 0.0 && overlap_prob <= 1.0))
    throw ConfigError(where + ": overlap_prob outside [0, 1]");
  if (clinician_name.empty() || child_name.empty() || clinician_name == child_name)
    throw ConfigError(where + ": speaker names must be distinct and non-empty");
  SessionMeta meta{session_id, group, severity};
  try {
    meta.validate();
  } catch (const ValidationError &e) {
    throw ConfigError(e.what());
  }
}

SessionBundle generate(const SynthConfig &cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  SessionAnnotation ann;
  ann.session_id = cfg.session_id;
  ann.total_duration = cfg.duration;
  Role role = Role::Clinician;
  double t = sample_length(rng, cfg.gap);
  while (t < cfg.duration) {
    const LengthDist &turn = role == Role::Clinician ? cfg.clinician_turn : cfg.child_turn;
    double start = quantize(t);
    double end = quantize(std::min(t + sample_length(rng, turn), cfg.duration));
    if (end > start)
      ann.segments.push_back(
          {{start, end}, role,
           role == Role::Clinician ? cfg.clinician_name : cfg.child_name});
    t = end + sample_length(rng, cfg.gap);
    role = role == Role::Clinician ? Role::Child : Role::Clinician;
  }
  // Cross-talk: push a turn's end into the following (other-role) turn, by
  // at most half of that turn, so same-role turns never collide.
  for (std::size_t i = 0; i + 1 < ann.segments.size(); ++i) {
    double u = rng.uniform();
    double frac = rng.uniform();
    if (u >= cfg.overlap_prob || ann.segments[i].role == ann.segments[i + 1].role) continue;
    const TimeSpan &next = ann.segments[i + 1].span;
    double end = quantize(next.start + frac * 0.5 * next.duration());
    ann.segments[i].span.end = std::max(ann.segments[i].span.end, end);
  }
  ann.sort_segments();

  FrameScores scores;
  scores.session_id = cfg.session_id;
  scores.hop = cfg.hop;
  auto n = static_cast<std::size_t>(std::llround(cfg.duration / cfg.hop));
  LabelSeq ref = frame_labels(ann, cfg.hop, n);
  scores.scores.resize(n);
  const auto &cover = *ref.role_labels;
  for (std::size_t k = 0; k < n; ++k) {
    const auto &c = cfg.clinician_speech, &h = cfg.child_speech, &z = cfg.nonspeech;
    switch (cover[k]) {
      case RoleCover::None: scores.scores[k] = rng.beta(z.alpha, z.beta); break;
      case RoleCover::Clinician: scores.scores[k] = rng.beta(c.alpha, c.beta); break;
      case RoleCover::Child: scores.scores[k] = rng.beta(h.alpha, h.beta); break;
      case RoleCover::Both: {
        double a = rng.beta(c.alpha, c.beta);
        double b = rng.beta(h.alpha, h.beta);
        scores.scores[k] = std::max(a, b);
        break;
      }
    }
  }
  SessionMeta meta{cfg.session_id, cfg.group, cfg.severity};
  return assemble_bundle(std::move(ann), std::move(scores), std::move(meta), cfg.duration);
}

std::vector<SynthConfig> parse_cohort_spec(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::parse_error &e) {
    throw ParseError(std::string("cohort spec: ") + e.what());
  }
  const ojson *list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("sessions")) throw ConfigError("cohort spec: missing 'sessions'");
    list = &doc.at("sessions");
  }
  if (!list->is_array()) throw ConfigError("cohort spec: sessions must be an array");

  std::vector<SynthConfig> out;
  std::set<std::string> seen;
  for (const auto &j : *list) {
    try {
      SynthConfig c;
      c.session_id = j.at("session_id").get<std::string>();
      c.seed = j.value("seed", c.seed);
      c.duration = j.value("duration_s", c.duration);
      c.hop = j.value("hop_s", c.hop);
      if (j.contains("group")) c.group = parse_group(j.at("group").get<std::string>());
      if (j.contains("severity") && !j.at("severity").is_null()) {
        const auto &s = j.at("severity");
        c.severity = Severity{s.at("obsession").get<int>(), s.at("compulsion").get<int>(),
                              s.at("total").get<int>()};
      }
      if (j.contains("clinician_turn"))
        c.clinician_turn = length_from(j.at("clinician_turn"), c.clinician_turn);
      if (j.contains("child_turn")) c.child_turn = length_from(j.at("child_turn"), c.child_turn);
      if (j.contains("gap")) c.gap = length_from(j.at("gap"), c.gap);
      if (j.contains("clinician_speech"))
        c.clinician_speech = beta_from(j.at("clinician_speech"), c.clinician_speech);
      if (j.contains("child_speech"))
        c.child_speech = beta_from(j.at("child_speech"), c.child_speech);
      if (j.contains("nonspeech")) c.nonspeech = beta_from(j.at("nonspeech"), c.nonspeech);
      c.overlap_prob = j.value("overlap_prob", c.overlap_prob);
      if (j.contains("speaker_names")) {
        c.clinician_name = j.at("speaker_names").value("clinician", c.clinician_name);
        c.child_name = j.at("speaker_names").value("child", c.child_name);
      }
      c.validate();
      if (!seen.insert(c.session_id).second)
        throw ConfigError("cohort spec: duplicate session_id '" + c.session_id + "'");
      out.push_back(std::move(c));
    } catch (const ojson::exception &e) {
      throw ConfigError(std::string("cohort spec: ") + e.what());
    }
  }
  return out;
}

std::string dump_cohort_spec(std::span<const SynthConfig> configs) {
  ojson list = ojson::array();
  for (const auto &c : configs) {
    ojson j;
    j["session_id"] = c.session_id;
    j["seed"] = c.seed;
    j["duration_s"] = c.duration;
    j["hop_s"] = c.hop;
    j["group"] = group_name(c.group);
    if (c.severity)
      j["severity"] = {{"obsession", c.severity->obsession},
                       {"compulsion", c.severity->compulsion},
                       {"total", c.severity->total}};
    j["clinician_turn"] = to_json(c.clinician_turn);
    j["child_turn"] = to_json(c.child_turn);
    j["gap"] = to_json(c.gap);
    j["clinician_speech"] = to_json(c.clinician_speech);
    j["child_speech"] = to_json(c.child_speech);
    j["nonspeech"] = to_json(c.nonspeech);
    j["overlap_prob"] = c.overlap_prob;
    j["speaker_names"] = {{"clinician", c.clinician_name}, {"child", c.child_name}};
    list.push_back(std::move(j));
  }
  ojson doc;
  doc["sessions"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<ManifestEntry> generate_cohort(std::span<const SynthConfig> configs,
                                           const std::filesystem::path &out_dir,
                                           unsigned jobs) {
  std::set<std::string> ids;
  for (const auto &c : configs) {
    c.validate();
    if (!ids.insert(c.session_id).second)
      throw ConfigError("duplicate session_id '" + c.session_id + "' in cohort");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<ManifestEntry> entries(configs.size());
  parallel_for(configs.size(), jobs, [&](std::size_t i) {
    const SynthConfig &c = configs[i];
    SessionBundle b = generate(c);
    ManifestEntry &e = entries[i];
    e.meta = b.meta;
    e.rttm_path = c.session_id + ".rttm";
    e.scores_path = c.session_id + ".scores.csv";
    e.speaker_map = {{c.clinician_name, Role::Clinician}, {c.child_name, Role::Child}};
    e.duration = c.duration;
    std::ostringstream rttm, csv;
    write_rttm(rttm, {b.annotation});
    write_scores(csv, b.scores);
    write_text(out_dir / e.rttm_path, rttm.str());
    write_text(out_dir / e.scores_path, csv.str());
  });
  write_text(out_dir / "manifest.json", dump_manifest(entries));
  return entries;
}

std::vector<SynthConfig> reference_cohort(std::uint64_t seed) {
  std::vector<SynthConfig> out;
  const int totals[] = {16, 20, 24, 30, 38};
  for (int i = 0; i < 5; ++i) {
    SynthConfig c;
    c.session_id = "patient" + std::to_string(i + 1);
    c.group = Group::Patient;
    int obsession = totals[i] / 2;
    c.severity = Severity{obsession, totals[i] - obsession, totals[i]};
    // Atypical speech: child posteriors sink toward the default threshold
    // as severity grows (0.62 at 16 down to 0.40 at 38).
    c.child_speech = BetaParams::from_mean(0.62 - 0.01 * (totals[i] - 16), 8.0);
    out.push_back(c);
  }
  for (int i = 0; i < 5; ++i) {
    SynthConfig c;
    c.session_id = "control" + std::to_string(i + 1);
    c.group = Group::Control;
    out.push_back(c);
  }
  reseed(out, seed);
  return out;
}

void reseed(std::span<SynthConfig> configs, std::uint64_t seed) {
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::uint64_t state = seed + i;
    configs[i].seed = splitmix64(state);
  }
}

}  // namespace vadcal
