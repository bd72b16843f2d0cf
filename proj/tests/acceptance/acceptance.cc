// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.h"
#include "vadcal/adapt.h"
#include "vadcal/analysis.h"
#include "vadcal/commands.h"
#include "vadcal/ingest.h"
#include "vadcal/kernels.h"
#include "vadcal/metrics.h"
#include "vadcal/synth.h"

using namespace vadcal;
namespace fs = std::filesystem;

namespace {

constexpr double kRateTol = 1e-12;
constexpr double kOracleSeconds = 10.0;
constexpr double kMonotoneSeconds = 5.0;
constexpr std::size_t kOracleBundles = 60;
constexpr std::size_t kMonotoneStreams = 100;
constexpr std::size_t kStationarySessions = 24;
constexpr double kPaperImprovement = 0.05;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char *name, const Outcome &o) {
  std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run(const char *name, const std::function<Outcome()> &fn) {
  try {
    report(name, fn());
  } catch (const std::exception &e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

bool rate_eq(const std::optional<double> &a, const std::optional<double> &b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= kRateTol;
}

bool counts_eq(const ConfusionCounts &c, const oracle::Counts &o) {
  return c.fn_frames == o.fn && c.fp_frames == o.fp && c.true_speech_frames == o.ts &&
         c.true_nonspeech_frames == o.tns;
}

std::vector<SessionBundle> cohort_bundles(const std::vector<SynthConfig> &cfgs) {
  std::vector<SessionBundle> out;
  for (const auto &c : cfgs) out.push_back(generate(c));
  return out;
}

std::vector<std::size_t> first_windows(std::size_t t) {
  std::vector<std::size_t> w(t);
  for (std::size_t i = 0; i < t; ++i) w[i] = i;
  return w;
}

double median_of(std::vector<double> v) {
  return summarize(v).median;
}

double variance(const std::vector<double> &v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Criteria ---------------------------------------------------------------

Outcome oracle_equivalence() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(20220901);
  const auto grid = ThresholdGrid{}.points();
  const std::optional<Role> filters[] = {std::nullopt, Role::Clinician, Role::Child};
  std::size_t checks = 0, mismatches = 0;
  for (std::size_t it = 0; it < kOracleBundles; ++it) {
    SessionBundle b = oracle::random_bundle(rng, 1000);
    double len = b.annotation.total_duration / static_cast<double>(2 + it % 4);
    PreparedSession ps(b, len);
    auto cov = oracle::cover(b.annotation, b.scores.hop, b.n_frames());
    const auto &wins = ps.windows();
    for (double th : grid) {
      for (const auto &f : filters) {
        auto reports = windowed_rates(ps, th, f);
        for (std::size_t w = 0; w < wins.size(); ++w) {
          auto o = oracle::count(cov, b.scores, f, th, {wins[w]});
          ++checks;
          if (!counts_eq(reports[w].counts, o) || !rate_eq(reports[w].fnr, ratio(o.fn, o.ts)) ||
              !rate_eq(reports[w].fpr, ratio(o.fp, o.tns)))
            ++mismatches;
        }
        auto whole = session_rates(ps, th, f);
        auto o = oracle::count(cov, b.scores, f, th);
        ++checks;
        if (!counts_eq(whole.counts, o) || !rate_eq(whole.fnr, ratio(o.fn, o.ts)) ||
            !rate_eq(whole.fpr, ratio(o.fp, o.tns)))
          ++mismatches;
      }
      // Objective over the first half of the windows.
      std::size_t half = std::max<std::size_t>(1, wins.size() / 2);
      std::vector<TimeSpan> spans(wins.begin(), wins.begin() + static_cast<long>(half));
      ++checks;
      if (std::abs(objective(ps, first_windows(half), th).value -
                   oracle::objective(b, spans, th)) > kRateTol)
        ++mismatches;
    }
  }
  double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleSeconds,
          fmt("%zu bundles, %zu checks, %zu mismatches, %.2f s (limit %.0f s, %s kernels)",
              kOracleBundles, checks, mismatches, secs, kOracleSeconds,
              std::string(kernels::isa_name(kernels::active_isa())).c_str())};
}

Outcome monotonicity() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  const auto grid = ThresholdGrid{}.points();
  const std::optional<Role> filters[] = {std::nullopt, Role::Clinician, Role::Child};
  std::size_t pairs = 0, violations = 0;
  for (std::size_t it = 0; it < kMonotoneStreams; ++it) {
    SessionBundle b = oracle::random_bundle(rng, 1000);
    PreparedSession ps(b, b.annotation.total_duration);
    for (const auto &f : filters) {
      std::vector<RateReport> at;
      for (double th : grid) at.push_back(session_rates(ps, th, f));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
          ++pairs;
          if (at[i].fnr && at[j].fnr && *at[i].fnr > *at[j].fnr) ++violations;
          if (at[i].fpr && at[j].fpr && *at[i].fpr < *at[j].fpr) ++violations;
        }
      }
    }
  }
  double secs = seconds_since(t0);
  return {violations == 0 && secs < kMonotoneSeconds,
          fmt("%zu streams x 3 filters, %zu threshold pairs, %zu violations, %.2f s (limit %.0f s)",
              kMonotoneStreams, pairs, violations, secs, kMonotoneSeconds)};
}

Outcome optimizer_soundness() {
  std::vector<SessionBundle> sessions = cohort_bundles(reference_cohort());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) sessions.push_back(oracle::random_bundle(rng, 1000));
  const auto grid = ThresholdGrid{}.points();
  std::size_t cases = 0, worse = 0, wrong_tie = 0;
  for (const auto &b : sessions) {
    double len = b.n_frames() > 1000 ? 60.0 : b.annotation.total_duration / 5.0;
    PreparedSession ps(b, len);
    std::size_t max_t = std::min<std::size_t>(5, ps.windows().size());
    for (std::size_t t = 1; t <= max_t; ++t) {
      auto train = first_windows(t);
      auto best = optimal_threshold(ps, train, {});
      ++cases;
      if (best.objective.value > objective(ps, train, 0.5).value) ++worse;
      // Full enumeration: the first grid point reaching the minimum.
      double min_v = 1e300, min_th = -1.0;
      for (double th : grid) {
        double v = objective(ps, train, th).value;
        if (v < min_v) min_v = v, min_th = th;
      }
      if (best.threshold != min_th || best.objective.value != min_v) ++wrong_tie;
    }
  }
  return {worse == 0 && wrong_tie == 0,
          fmt("%zu (session, T) cases, %zu above objective(0.5), %zu not the lowest minimizer",
              cases, worse, wrong_tie)};
}

Outcome pooling_identity() {
  std::mt19937_64 rng(99);
  std::size_t checks = 0, bad = 0;
  auto check = [&](const SessionBundle &b, double len) {
    PreparedSession ps(b, len);
    for (double th : {0.0, 0.25, 0.5, 0.73, 1.0}) {
      for (auto f : {std::optional<Role>{}, std::optional<Role>{Role::Clinician},
                     std::optional<Role>{Role::Child}}) {
        auto pooled = pool(windowed_rates(ps, th, f));
        auto whole = session_rates(ps, th, f);
        ++checks;
        if (!(pooled.counts.fn_frames == whole.counts.fn_frames &&
              pooled.counts.fp_frames == whole.counts.fp_frames &&
              pooled.counts.true_speech_frames == whole.counts.true_speech_frames &&
              pooled.counts.true_nonspeech_frames == whole.counts.true_nonspeech_frames &&
              rate_eq(pooled.fnr, whole.fnr) && rate_eq(pooled.fpr, whole.fpr)))
          ++bad;
      }
    }
  };
  for (int i = 0; i < 100; ++i) {
    SessionBundle b = oracle::random_bundle(rng, 1000);
    // Window lengths whose windows tile the whole session.
    check(b, b.annotation.total_duration / static_cast<double>(1 + i % 7));
  }
  for (const auto &b : cohort_bundles(reference_cohort())) check(b, 60.0);
  return {bad == 0, fmt("%zu (session, threshold, role) checks, %zu mismatches (tol %g)", checks,
                        bad, kRateTol)};
}

struct CohortResults {
  std::vector<SynthConfig> cfgs;
  std::vector<SessionBundle> bundles;
  std::vector<PreparedSession> prepared;
  std::vector<AdaptationCurve> curves;
};

const CohortResults &reference() {
  static CohortResults r = [] {
    CohortResults c;
    c.cfgs = reference_cohort();
    c.bundles = cohort_bundles(c.cfgs);
    for (const auto &b : c.bundles) c.prepared.emplace_back(b, 60.0);
    for (const auto &p : c.prepared) c.curves.push_back(few_instance_adapt(p, 5, {}));
    return c;
  }();
  return r;
}

Outcome group_reproduction() {
  const auto &r = reference();
  std::vector<double> patient_child, control_child;
  std::vector<SeverityPoint> sev;
  for (std::size_t i = 0; i < r.bundles.size(); ++i) {
    for (const auto &rep : windowed_rates(r.prepared[i], 0.5, Role::Child))
      if (rep.fnr) (r.cfgs[i].group == Group::Patient ? patient_child : control_child)
                       .push_back(*rep.fnr);
    if (r.cfgs[i].group == Group::Patient) {
      auto pooled = session_rates(r.prepared[i], 0.5, Role::Child);
      sev.push_back({r.cfgs[i].severity->total, *pooled.fnr});
    }
  }
  double mp = median_of(patient_child), mc = median_of(control_child);
  auto corr = severity_correlation(sev);
  auto agg = curve_aggregate(r.curves);
  double tp = agg.at(Group::Patient).back().threshold.mean;
  double tc = agg.at(Group::Control).back().threshold.mean;
  bool a = mp > mc;
  bool b = corr.spearman_rho && *corr.spearman_rho == 1.0;
  bool c = tp < tc;
  return {a && b && c,
          fmt("(a) child median FNR patient %.4f vs control %.4f [%s]; "
              "(b) severity Spearman rho %.6f [%s]; "
              "(c) mean adapted threshold at T=5 patient %.3f vs control %.3f [%s]",
              mp, mc, a ? "ok" : "no", corr.spearman_rho.value_or(NAN), b ? "ok" : "no", tp, tc,
              c ? "ok" : "no")};
}

Outcome improvement_analog() {
  const auto &r = reference();
  std::map<std::string, Group> groups;
  std::vector<RateReport> def, ada;
  for (std::size_t i = 0; i < r.bundles.size(); ++i) {
    groups[r.cfgs[i].session_id] = r.cfgs[i].group;
    double th = r.curves[i].points.back().threshold;
    auto valid = validation_windows(r.prepared[i].windows().size(), 5);
    auto d = windowed_rates(r.prepared[i], 0.5, Role::Child);
    auto a = windowed_rates(r.prepared[i], th, Role::Child);
    for (auto w : valid) def.push_back(d[w]), ada.push_back(a[w]);
  }
  auto imp = improvement(def, ada, groups);
  double p = imp.cells.at({Role::Child, Group::Patient}).median;
  double c = imp.cells.at({Role::Child, Group::Control}).median;
  return {p > 0.0, fmt("median child FNR improvement patient %+.4f, control %+.4f "
                       "(qualitative reference: up to %+.2f)",
                       p, c, kPaperImprovement)};
}

Outcome stabilization() {
  std::vector<std::vector<double>> by_t(5);
  for (std::size_t s = 0; s < kStationarySessions; ++s) {
    SynthConfig c;
    c.session_id = "stationary" + std::to_string(s);
    c.seed = 1000 + s;
    c.group = Group::Patient;
    c.child_speech = BetaParams::from_mean(0.5, 8.0);
    SessionBundle b = generate(c);
    auto curve = few_instance_adapt(PreparedSession(b, 60.0), 5, {});
    for (std::size_t t = 0; t < 5; ++t) by_t[t].push_back(curve.points[t].threshold);
  }
  std::string traj;
  bool monotone = true;
  double prev = 1e300;
  for (std::size_t t = 0; t < 5; ++t) {
    double v = variance(by_t[t]);
    traj += fmt("%sT=%zu %.5f", t ? ", " : "", t + 1, v);
    monotone = monotone && v <= prev;
    prev = v;
  }
  double v1 = variance(by_t[0]), v5 = variance(by_t[4]);
  return {v5 <= v1, fmt("threshold variance across %zu sessions: %s (%s)", kStationarySessions,
                        traj.c_str(), monotone ? "monotone" : "not monotone")};
}

Outcome format_round_trips() {
  std::size_t checks = 0, bad = 0;
  SpeakerMap map = {{"clin", Role::Clinician}, {"child", Role::Child}};
  std::vector<SessionAnnotation> anns;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    SynthConfig c;
    c.session_id = "rt" + std::to_string(i);
    c.seed = static_cast<std::uint64_t>(i);
    c.duration = 120;
    SessionBundle b = generate(c);
    anns.push_back(b.annotation);

    std::ostringstream s1, s2;
    write_scores(s1, b.scores);
    write_scores(s2, parse_scores(s1.str(), b.session_id()));
    ++checks;
    bad += s1.str() != s2.str();

    // Arbitrary times and scores, not produced by the generator.
    SessionBundle r = oracle::random_bundle(rng, 1000);
    r.annotation.session_id = c.session_id + "x";
    anns.push_back(r.annotation);
    std::ostringstream t1, t2;
    write_scores(t1, r.scores);
    write_scores(t2, parse_scores(t1.str()));
    ++checks;
    bad += t1.str() != t2.str();
  }
  std::ostringstream r1, r2;
  write_rttm(r1, anns);
  write_rttm(r2, parse_rttm(r1.str(), map));
  ++checks;
  bad += r1.str() != r2.str();

  auto cfgs = reference_cohort();
  Manifest m;
  for (const auto &c : cfgs) {
    ManifestEntry e;
    e.meta = {c.session_id, c.group, c.severity};
    e.rttm_path = c.session_id + ".rttm";
    e.scores_path = c.session_id + ".scores.csv";
    e.speaker_map = map;
    e.duration = c.duration;
    m.entries.push_back(e);
  }
  std::string m1 = dump_manifest(m.entries);
  std::string m2 = dump_manifest(load_manifest(m1).entries);
  ++checks;
  bad += m1 != m2;
  return {bad == 0, fmt("%zu serialize-parse-serialize checks (RTTM, score CSV, manifest), %zu "
                        "differ",
                        checks, bad)};
}

std::map<std::string, std::string> snapshot(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return out;
}

Outcome end_to_end_determinism() {
  fs::path root = fs::temp_directory_path() /
                  ("vadcal_acceptance_" + std::string(kernels::isa_name(kernels::active_isa())));
  fs::remove_all(root);
  std::ostringstream log;
  auto pipeline = [&](const fs::path &dir, unsigned jobs) {
    SynthRun s;
    s.out_dir = dir / "cohort";
    s.seed = 7;
    s.jobs = jobs;
    int rc = cmd_synth(s, log);
    RunConfig cfg;
    cfg.manifest = dir / "cohort" / "manifest.json";
    cfg.jobs = jobs;
    cfg.out_dir = dir / "evaluate";
    rc |= cmd_evaluate(cfg, log);
    cfg.out_dir = dir / "adapt";
    rc |= cmd_adapt(cfg, log);
    return rc;
  };
  int rc = pipeline(root / "a", 1) | pipeline(root / "b", 4);
  auto a = snapshot(root / "a"), b = snapshot(root / "b");
  std::size_t differ = 0;
  for (const auto &[name, text] : a) differ += !b.count(name) || b.at(name) != text;
  bool ok = rc == 0 && a.size() == b.size() && differ == 0 && a.size() > 20;
  fs::remove_all(root);
  return {ok, fmt("synth+evaluate+adapt twice (1 and 4 jobs): %zu files, %zu differ, exit %d",
                  a.size(), differ, rc)};
}

}  // namespace

int main() {
  run("oracle equivalence", oracle_equivalence);
  run("monotonicity", monotonicity);
  run("optimizer soundness", optimizer_soundness);
  run("pooling identity", pooling_identity);
  run("group reproduction", group_reproduction);
  run("improvement analog", improvement_analog);
  run("adaptation stabilization", stabilization);
  run("format round-trips", format_round_trips);
  run("end-to-end determinism", end_to_end_determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
