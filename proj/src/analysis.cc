// src/analysis.cc

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

#include "vadcal/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vadcal/error.h"

namespace vadcal {

namespace {

using PairKey = std::tuple<std::string, std::size_t, int>;

PairKey key_of(const RateReport &r) {
  return {r.session_id, r.window_index.value_or(0),
          r.role_filter ? static_cast<int>(*r.role_filter) : -1};
}

std::string describe(const PairKey &k) {
  int role = std::get<2>(k);
  return "(session '" + std::get<0>(k) + "', window " +
         std::to_string(std::get<1>(k)) + ", role " +
         (role < 0 ? std::string("all")
                   : std::string(role_name(static_cast<Role>(role)))) +
         ")";
}

std::map<PairKey, const RateReport *> index_reports(std::span<const RateReport> reports,
                                                    const char *which) {
  std::map<PairKey, const RateReport *> out;
  for (const auto &r : reports) {
    auto k = key_of(r);
    if (!out.emplace(k, &r).second)
      throw PairingError(std::string("duplicate ") + which + " report " + describe(k));
  }
  return out;
}

}  // namespace

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw SizeError("quantile of empty sample");
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

DistSummary summarize(std::span<const double> values) {
  if (values.empty()) throw SizeError("summarize: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  DistSummary s;
  s.n = v.size();
  s.min = v.front();
  s.max = v.back();
  s.q1 = sorted_quantile(v, 0.25);
  s.median = sorted_quantile(v, 0.5);
  s.q3 = sorted_quantile(v, 0.75);
  s.iqr = s.q3 - s.q1;
  // Summing in sorted order keeps the mean independent of input order.
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult severity_correlation(std::span<const SeverityPoint> points) {
  if (points.size() < 2)
    throw SizeError("severity correlation needs at least 2 sessions");
  std::vector<double> sev, fnr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].severity)
      throw ValidationError("severity correlation: point " + std::to_string(i) +
                            " has no severity score (filter out controls)");
    sev.push_back(*points[i].severity);
    fnr.push_back(points[i].fnr);
  }
  CorrelationResult r;
  r.n = points.size();
  r.pearson_r = pearson(sev, fnr);
  auto rs = average_ranks(sev), rf = average_ranks(fnr);
  r.spearman_rho = pearson(rs, rf);

  auto [smin, smax] = std::minmax_element(sev.begin(), sev.end());
  auto [fmin, fmax] = std::minmax_element(fnr.begin(), fnr.end());
  for (double s : sev) {
    if (*smax > *smin)
      r.normalized_severity.push_back(*fmin + (s - *smin) / (*smax - *smin) * (*fmax - *fmin));
    else
      r.normalized_severity.push_back((*fmin + *fmax) / 2.0);
  }
  return r;
}

ImprovementResult improvement(std::span<const RateReport> default_reports,
                              std::span<const RateReport> adapted_reports,
                              const std::map<std::string, Group> &session_groups) {
  auto defaults = index_reports(default_reports, "default");
  auto adapted = index_reports(adapted_reports, "adapted");
  for (const auto &[k, r] : adapted)
    if (!defaults.count(k)) throw PairingError("unpaired adapted report " + describe(k));

  ImprovementResult out;
  std::map<ImprovementCell, std::vector<double>> deltas;
  for (const auto &[k, d] : defaults) {
    auto it = adapted.find(k);
    if (it == adapted.end()) throw PairingError("unpaired default report " + describe(k));
    auto g = session_groups.find(d->session_id);
    if (g == session_groups.end())
      throw PairingError("no group for session '" + d->session_id + "'");
    if (!d->fnr || !it->second->fnr) {
      ++out.skipped_undefined;
      continue;
    }
    ImprovementPair p{d->session_id, d->window_index.value_or(0),
                      {d->role_filter, g->second}, *d->fnr, *it->second->fnr};
    deltas[p.cell].push_back(p.delta());
    out.pairs.push_back(std::move(p));
  }
  for (const auto &[cell, v] : deltas) out.cells[cell] = summarize(v);
  return out;
}

}  // namespace vadcal
