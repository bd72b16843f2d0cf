// include/vadcal/analysis.h

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
#include <tuple>
#include <vector>

#include "vadcal/metrics.h"
#include "vadcal/types.h"

namespace vadcal {

/// Box-plot statistics. Quartiles interpolate linearly between closest
/// ranks: q(p) sits at position p*(n-1) of the sorted values.
struct DistSummary {
  std::size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Throws SizeError on empty input.
DistSummary summarize(std::span<const double> values);

/// Linear-interpolation quantile of already sorted values, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

struct SeverityPoint {
  std::optional<int> severity;  // CY-BOCS total
  double fnr = 0.0;
};

struct CorrelationResult {
  // Empty when either variable has zero variance.
  std::optional<double> spearman_rho;
  std::optional<double> pearson_r;
  std::size_t n = 0;
  /// Severities min-max mapped onto [min FNR, max FNR], input order.
  std::vector<double> normalized_severity;
};

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Throws SizeError for n < 2 and ValidationError when a severity is missing.
CorrelationResult severity_correlation(std::span<const SeverityPoint> points);

struct ImprovementCell {
  std::optional<Role> role;  // empty: all speakers
  Group group = Group::Control;

  friend auto operator<=>(const ImprovementCell &, const ImprovementCell &) = default;
};

struct ImprovementPair {
  std::string session_id;
  std::size_t window_index = 0;
  ImprovementCell cell;
  double fnr_default = 0.0;
  double fnr_adapted = 0.0;
  double delta() const { return fnr_default - fnr_adapted; }
};

struct ImprovementResult {
  std::vector<ImprovementPair> pairs;
  std::map<ImprovementCell, DistSummary> cells;
  std::size_t skipped_undefined = 0;  // pairs where either FNR was undefined
};

/// Pairs reports by (session, window, role filter) and summarizes
/// delta = fnr_default - fnr_adapted per (role, group) cell. Throws
/// PairingError naming the key of any unmatched or duplicated report.
ImprovementResult improvement(std::span<const RateReport> default_reports,
                              std::span<const RateReport> adapted_reports,
                              const std::map<std::string, Group> &session_groups);

}  // namespace vadcal
