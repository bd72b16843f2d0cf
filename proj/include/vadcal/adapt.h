// include/vadcal/adapt.h

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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vadcal/ingest.h"
#include "vadcal/metrics.h"

namespace vadcal {

/// Candidate thresholds lo, lo+step, ..., hi (both endpoints included).
struct ThresholdGrid {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.01;

  void validate() const;
  std::vector<double> points() const;
  /// Parses "lo:hi:step".
  static ThresholdGrid parse(std::string_view text);
};

/// Pooled FNR + pooled FPR over a set of windows. A term whose pooled
/// denominator is zero contributes 0 and raises its flag.
struct ObjectiveValue {
  double value = 0.0;
  bool fnr_undefined = false;
  bool fpr_undefined = false;
  ConfusionCounts counts;

  bool flagged() const { return fnr_undefined || fpr_undefined; }
};

ObjectiveValue objective(const PreparedSession &session,
                         std::span<const std::size_t> windows, double threshold);
ObjectiveValue objective(const SessionBundle &bundle, double window_len,
                         std::span<const std::size_t> windows, double threshold);

struct OptimalThreshold {
  double threshold = 0.5;
  ObjectiveValue objective;
};

/// Exhaustive search over the grid; the lowest threshold wins ties.
OptimalThreshold optimal_threshold(const PreparedSession &session,
                                   std::span<const std::size_t> windows,
                                   const ThresholdGrid &grid);

/// Each window tuned on itself alone.
struct OracleWindow {
  std::size_t index = 0;
  TimeSpan window;
  double threshold = 0.5;
  ObjectiveValue objective;
  std::optional<double> fnr_default;
  std::optional<double> fnr_adapted;
  /// fnr_default - fnr_adapted; positive means the tuned threshold helped.
  std::optional<double> delta() const {
    if (!fnr_default || !fnr_adapted) return std::nullopt;
    return *fnr_default - *fnr_adapted;
  }
};

std::vector<OracleWindow> per_window_oracle(const PreparedSession &session,
                                            const ThresholdGrid &grid,
                                            double default_threshold = 0.5);

struct CurvePoint {
  std::size_t train_windows = 0;  // T
  double threshold = 0.5;
  ObjectiveValue train_objective;
  std::optional<double> train_fnr;
  std::optional<double> train_fpr;
  std::optional<double> valid_fnr;
  std::optional<double> valid_fpr;
};

struct AdaptationCurve {
  std::string session_id;
  Group group = Group::Control;
  std::vector<CurvePoint> points;  // T = 1..T_max
};

/// Trains on windows 0..T-1 for T = 1..t_max and validates every adapted
/// threshold on the last t_max windows. Needs at least 2*t_max windows.
AdaptationCurve few_instance_adapt(const PreparedSession &session, std::size_t t_max,
                                   const ThresholdGrid &grid);

/// Indices of the validation windows used by few_instance_adapt.
std::vector<std::size_t> validation_windows(std::size_t n_windows, std::size_t t_max);

/// Mean with a two-sided Student-t 95% interval. The interval is absent
/// for n < 2.
struct MeanCI {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

MeanCI mean_ci95(std::span<const double> values);

struct AggregatePoint {
  std::size_t train_windows = 0;
  MeanCI threshold;
  MeanCI train_fnr;
  MeanCI valid_fnr;
};

/// Per group, per T. Undefined FNRs are left out of that statistic.
std::map<Group, std::vector<AggregatePoint>> curve_aggregate(
    std::span<const AdaptationCurve> curves);

}  // namespace vadcal
