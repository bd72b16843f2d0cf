// include/vadcal/commands.h

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

// The vadcal command-line surface. Every subcommand is deterministic for
// fixed inputs and flags; reports are written only after all sessions have
// been processed, by a single writer.
//
// Exit codes: 0 ok, 2 input error, 3 internal error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vadcal/adapt.h"
#include "vadcal/binarizer.h"

namespace vadcal {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Csv, Json };
enum class SeverityFnr { Pooled, WindowMean };

struct RunConfig {
  std::filesystem::path manifest;
  double threshold = 0.5;
  double window_len = 60.0;
  ThresholdGrid grid;
  std::size_t t_max = 5;
  std::filesystem::path out_dir = ".";
  PostProcessParams post;
  ReportFormat format = ReportFormat::Csv;
  SeverityFnr severity_fnr = SeverityFnr::Pooled;
  unsigned jobs = 1;

  void validate() const;
};

struct SynthRun {
  std::optional<std::filesystem::path> spec;  // built-in reference cohort if empty
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

/// Each returns the process exit code; diagnostics go to `log`.
int cmd_evaluate(const RunConfig &config, std::ostream &log);
int cmd_adapt(const RunConfig &config, std::ostream &log);
int cmd_sweep(const RunConfig &config, std::ostream &log);
int cmd_synth(const SynthRun &run, std::ostream &log);

/// Parses argv-style arguments (args[0] is the program name) and runs the
/// selected subcommand.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &log);

}  // namespace vadcal
