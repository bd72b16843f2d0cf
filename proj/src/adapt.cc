// src/adapt.cc

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

#include "vadcal/adapt.h"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vadcal/error.h"

namespace vadcal {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

ConfusionCounts pooled_counts(const PreparedSession &session,
                              std::span<const std::size_t> windows, double th) {
  ConfusionCounts total;
  total.hop = session.bundle().hop();
  for (std::size_t w : windows) total += session.count(w, th);
  return total;
}

}  // namespace

void ThresholdGrid::validate() const {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0) || !(step > 0.0)) {
    std::ostringstream os;
    os << "invalid threshold grid " << lo << ":" << hi << ":" << step
       << " (need 0 <= lo < hi <= 1, step > 0)";
    throw DomainError(os.str());
  }
}

std::vector<double> ThresholdGrid::points() const {
  validate();
  double span = hi - lo;
  double steps = span / step;
  double whole = std::round(steps);
  std::vector<double> out;
  if (std::abs(steps - whole) < 1e-9 * std::max(1.0, steps)) {
    // Evenly divisible: lo + span*i/n lands on the nearest double of each
    // decimal grid point, so 0.5 is exactly 0.5.
    auto n = static_cast<std::size_t>(whole);
    for (std::size_t i = 0; i <= n; ++i)
      out.push_back(i == n ? hi : lo + span * static_cast<double>(i) / whole);
  } else {
    auto n = static_cast<std::size_t>(std::floor(steps));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
    out.push_back(hi);
  }
  return out;
}

ThresholdGrid ThresholdGrid::parse(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ':', ' ');
  std::istringstream in(s);
  ThresholdGrid g;
  std::string rest;
  if (!(in >> g.lo >> g.hi >> g.step) || (in >> rest))
    throw DomainError("grid must look like lo:hi:step, got '" + std::string(text) + "'");
  g.validate();
  return g;
}

ObjectiveValue objective(const PreparedSession &session,
                         std::span<const std::size_t> windows, double threshold) {
  if (windows.empty()) throw DomainError("objective: empty window set");
  ObjectiveValue v;
  v.counts = pooled_counts(session, windows, threshold);
  auto fnr = ratio(v.counts.fn_frames, v.counts.true_speech_frames);
  auto fpr = ratio(v.counts.fp_frames, v.counts.true_nonspeech_frames);
  v.fnr_undefined = !fnr;
  v.fpr_undefined = !fpr;
  v.value = fnr.value_or(0.0) + fpr.value_or(0.0);
  return v;
}

ObjectiveValue objective(const SessionBundle &bundle, double window_len,
                         std::span<const std::size_t> windows, double threshold) {
  PreparedSession session(bundle, window_len);
  return objective(session, windows, threshold);
}

OptimalThreshold optimal_threshold(const PreparedSession &session,
                                   std::span<const std::size_t> windows,
                                   const ThresholdGrid &grid) {
  auto points = grid.points();
  OptimalThreshold best;
  bool have = false;
  for (double th : points) {
    ObjectiveValue v = objective(session, windows, th);
    if (!have || v.value < best.objective.value) {
      best = {th, v};
      have = true;
    }
  }
  return best;
}

std::vector<OracleWindow> per_window_oracle(const PreparedSession &session,
                                            const ThresholdGrid &grid,
                                            double default_threshold) {
  std::vector<OracleWindow> out;
  for (std::size_t w = 0; w < session.windows().size(); ++w) {
    std::size_t idx[] = {w};
    OptimalThreshold best = optimal_threshold(session, idx, grid);
    OracleWindow row;
    row.index = w;
    row.window = session.windows()[w];
    row.threshold = best.threshold;
    row.objective = best.objective;
    auto def = session.count(w, default_threshold);
    row.fnr_default = ratio(def.fn_frames, def.true_speech_frames);
    row.fnr_adapted = ratio(best.objective.counts.fn_frames,
                            best.objective.counts.true_speech_frames);
    out.push_back(row);
  }
  return out;
}

std::vector<std::size_t> validation_windows(std::size_t n_windows, std::size_t t_max) {
  if (t_max == 0) throw SizeError("t_max must be at least 1");
  if (n_windows < 2 * t_max)
    throw SizeError("adaptation needs at least " + std::to_string(2 * t_max) +
                    " windows, session has " + std::to_string(n_windows));
  std::vector<std::size_t> out(t_max);
  std::iota(out.begin(), out.end(), n_windows - t_max);
  return out;
}

AdaptationCurve few_instance_adapt(const PreparedSession &session, std::size_t t_max,
                                   const ThresholdGrid &grid) {
  const auto &bundle = session.bundle();
  std::vector<std::size_t> valid;
  try {
    valid = validation_windows(session.windows().size(), t_max);
  } catch (const SizeError &e) {
    throw SizeError("session '" + bundle.session_id() + "': " + e.what());
  }
  AdaptationCurve curve;
  curve.session_id = bundle.session_id();
  curve.group = bundle.meta.group;
  std::vector<std::size_t> train;
  for (std::size_t t = 1; t <= t_max; ++t) {
    train.push_back(t - 1);
    OptimalThreshold best = optimal_threshold(session, train, grid);
    CurvePoint p;
    p.train_windows = t;
    p.threshold = best.threshold;
    p.train_objective = best.objective;
    const auto &tc = best.objective.counts;
    p.train_fnr = ratio(tc.fn_frames, tc.true_speech_frames);
    p.train_fpr = ratio(tc.fp_frames, tc.true_nonspeech_frames);
    auto vc = pooled_counts(session, valid, best.threshold);
    p.valid_fnr = ratio(vc.fn_frames, vc.true_speech_frames);
    p.valid_fpr = ratio(vc.fp_frames, vc.true_nonspeech_frames);
    curve.points.push_back(p);
  }
  return curve;
}

MeanCI mean_ci95(std::span<const double> values) {
  MeanCI r;
  r.n = values.size();
  if (r.n == 0) return r;
  double n = static_cast<double>(r.n);
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  boost::math::students_t dist(n - 1.0);
  double t = boost::math::quantile(dist, 0.975);
  r.ci_lo = r.mean - t * se;
  r.ci_hi = r.mean + t * se;
  return r;
}

std::map<Group, std::vector<AggregatePoint>> curve_aggregate(
    std::span<const AdaptationCurve> curves) {
  std::map<Group, std::vector<const AdaptationCurve *>> by_group;
  for (const auto &c : curves) by_group[c.group].push_back(&c);

  std::map<Group, std::vector<AggregatePoint>> out;
  for (const auto &[group, members] : by_group) {
    std::size_t t_len = 0;
    for (const auto *c : members) t_len = std::max(t_len, c->points.size());
    auto &rows = out[group];
    for (std::size_t i = 0; i < t_len; ++i) {
      std::vector<double> th, train, valid;
      for (const auto *c : members) {
        if (i >= c->points.size()) continue;
        const CurvePoint &p = c->points[i];
        th.push_back(p.threshold);
        if (p.train_fnr) train.push_back(*p.train_fnr);
        if (p.valid_fnr) valid.push_back(*p.valid_fnr);
      }
      rows.push_back({i + 1, mean_ci95(th), mean_ci95(train), mean_ci95(valid)});
    }
  }
  return out;
}

}  // namespace vadcal
