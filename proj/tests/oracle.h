// Brute-force reference computations for tests. Nothing here calls the
// kernels, frames_in, PreparedSession or truth_classes: every count is a
// direct walk over frame centers and scores.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "vadcal/ingest.h"
#include "vadcal/types.h"

namespace oracle {

using vadcal::Role;

struct Counts {
  std::uint64_t fn = 0, fp = 0, ts = 0, tns = 0;
};

inline double center(std::size_t k, double hop) { return (static_cast<double>(k) + 0.5) * hop; }

// Bit 0 clinician, bit 1 child, by testing every segment against the center.
inline std::vector<int> cover(const vadcal::SessionAnnotation &a, double hop, std::size_t n) {
  std::vector<int> out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    double c = center(k, hop);
    for (const auto &s : a.segments)
      if (c >= s.span.start && c < s.span.end) out[k] |= s.role == Role::Clinician ? 1 : 2;
  }
  return out;
}

inline bool in_window(std::size_t k, double hop, const vadcal::TimeSpan &w) {
  double c = center(k, hop);
  return c >= w.start && c < w.end;
}

// Counts over frames whose center is in any of `windows` (all frames when
// windows is empty), predicted speech iff score > th.
inline Counts count(const std::vector<int> &cov, const vadcal::FrameScores &scores,
                    std::optional<Role> filter, double th,
                    const std::vector<vadcal::TimeSpan> &windows = {}) {
  const double hop = scores.hop;
  int want = !filter ? 3 : (*filter == Role::Clinician ? 1 : 2);
  Counts c;
  for (std::size_t k = 0; k < cov.size(); ++k) {
    if (!windows.empty()) {
      bool inside = false;
      for (const auto &w : windows) inside = inside || in_window(k, hop, w);
      if (!inside) continue;
    }
    bool pred = scores.scores[k] > th;
    if (cov[k] & want) {
      ++c.ts;
      if (!pred) ++c.fn;
    } else if (cov[k] == 0) {
      ++c.tns;
      if (pred) ++c.fp;
    }
  }
  return c;
}

inline Counts count(const vadcal::SessionBundle &b, std::optional<Role> filter, double th,
                    const std::vector<vadcal::TimeSpan> &windows = {}) {
  auto cov = cover(b.annotation, b.scores.hop, b.scores.scores.size());
  return count(cov, b.scores, filter, th, windows);
}

inline double objective(const vadcal::SessionBundle &b, const std::vector<vadcal::TimeSpan> &w,
                        double th) {
  Counts c = count(b, std::nullopt, th, w);
  double v = 0.0;
  if (c.ts) v += static_cast<double>(c.fn) / static_cast<double>(c.ts);
  if (c.tns) v += static_cast<double>(c.fp) / static_cast<double>(c.tns);
  return v;
}

// Random small bundle: segment boundaries often land exactly on frame
// centers or edges, scores often repeat grid values to create ties.
inline vadcal::SessionBundle random_bundle(std::mt19937_64 &rng, std::size_t max_frames = 1000) {
  std::uniform_int_distribution<std::size_t> nf(20, max_frames);
  const double hops[] = {0.01, 0.02, 0.05, 0.1};
  double hop = hops[rng() % 4];
  std::size_t n = nf(rng);
  double total = static_cast<double>(n) * hop;
  vadcal::SessionAnnotation a;
  a.session_id = "r";
  a.total_duration = total;
  for (Role role : {Role::Clinician, Role::Child}) {
    double t = 0.0;
    std::uniform_real_distribution<double> len(0.0, total / 6.0);
    for (;;) {
      double prev = t;
      t += len(rng);
      if (rng() % 3 == 0) t = std::round(t / hop * 2.0) / 2.0 * hop;  // snap to center/edge
      t = std::max(t, prev);
      double e = t + len(rng) + hop / 4;
      if (rng() % 3 == 0) e = std::round(e / hop * 2.0) / 2.0 * hop;
      if (e > total || !(e > t)) break;
      a.segments.push_back({{t, e}, role, role == Role::Clinician ? "clin" : "child"});
      t = e;
    }
  }
  a.sort_segments();
  vadcal::FrameScores s;
  s.hop = hop;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    double v = u(rng);
    if (rng() % 4 == 0) v = static_cast<double>(rng() % 101) / 100.0;
    s.scores.push_back(v);
  }
  return vadcal::assemble_bundle(std::move(a), std::move(s), {"r", vadcal::Group::Control, {}},
                                 total);
}

}  // namespace oracle
