// include/vadcal/synth.h

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

// Deterministic synthetic clinician-child sessions: alternating turns with
// sampled gaps, optional cross-talk, and Beta-distributed posterior scores
// per speaker role. The same config always yields the same bundle, bit for
// bit, which is what the oracle tests and the reference cohort rely on.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vadcal/ingest.h"

namespace vadcal {

/// Truncated length distribution: min + Exp(mean - min), clamped to max.
struct LengthDist {
  double mean = 1.0;
  double min = 0.1;
  double max = 5.0;
};

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }
  double variance() const {
    double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
  /// alpha = mean*k, beta = (1-mean)*k.
  static BetaParams from_mean(double mean, double concentration) {
    return {mean * concentration, (1.0 - mean) * concentration};
  }
};

struct SynthConfig {
  std::string session_id = "synth";
  std::uint64_t seed = 0;
  double duration = 600.0;
  double hop = kDefaultHop;
  LengthDist clinician_turn{4.0, 0.5, 15.0};
  LengthDist child_turn{3.0, 0.5, 12.0};
  LengthDist gap{1.0, 0.1, 5.0};
  BetaParams clinician_speech = BetaParams::from_mean(0.85, 8.0);
  BetaParams child_speech = BetaParams::from_mean(0.80, 8.0);
  BetaParams nonspeech = BetaParams::from_mean(0.20, 8.0);
  double overlap_prob = 0.1;
  Group group = Group::Control;
  std::optional<Severity> severity;
  std::string clinician_name = "clin";
  std::string child_name = "child";

  /// Throws ConfigError.
  void validate() const;
};

SessionBundle generate(const SynthConfig &config);

/// Cohort spec file: {"sessions": [...]} or a bare array; omitted keys take
/// SynthConfig defaults. Key names are listed in README.md.
std::vector<SynthConfig> parse_cohort_spec(std::string_view json_text);
std::string dump_cohort_spec(std::span<const SynthConfig> configs);

/// Writes <id>.rttm, <id>.scores.csv per session plus manifest.json.
/// Returns the manifest entries written.
std::vector<ManifestEntry> generate_cohort(std::span<const SynthConfig> configs,
                                           const std::filesystem::path &out_dir,
                                           unsigned jobs = 1);

/// 5 patients (CY-BOCS totals 16, 20, 24, 30, 38; child speech scores
/// drift toward the threshold as severity grows) and 5 controls.
std::vector<SynthConfig> reference_cohort(std::uint64_t seed = 2022);

/// Replaces each config's seed with splitmix64 of (seed + index).
void reseed(std::span<SynthConfig> configs, std::uint64_t seed);

}  // namespace vadcal
