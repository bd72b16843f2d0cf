// src/commands.cc

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

#include "vadcal/commands.h"

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vadcal/analysis.h"
#include "vadcal/error.h"
#include "vadcal/metrics.h"
#include "vadcal/parallel.h"
#include "vadcal/synth.h"

namespace vadcal {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

const std::optional<Role> kRoleFilters[] = {std::nullopt, Role::Clinician, Role::Child};

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(const std::optional<double> &v) { return v ? num(*v) : "NA"; }

ojson jnum(const std::optional<double> &v) { return v ? ojson(*v) : ojson(nullptr); }

std::string role_label(std::optional<Role> r) {
  return r ? std::string(role_name(*r)) : std::string("All");
}

ojson to_json(const DistSummary &s) {
  return {{"n", s.n},       {"median", s.median}, {"q1", s.q1},   {"q3", s.q3},
          {"iqr", s.iqr},   {"mean", s.mean},     {"min", s.min}, {"max", s.max}};
}

ojson to_json(const MeanCI &m) {
  if (m.n == 0) return {{"n", 0}, {"mean", nullptr}, {"ci_lo", nullptr}, {"ci_hi", nullptr}};
  return {{"n", m.n}, {"mean", m.mean}, {"ci_lo", jnum(m.ci_lo)}, {"ci_hi", jnum(m.ci_hi)}};
}

ojson grid_json(const ThresholdGrid &g) {
  return {{"lo", g.lo}, {"hi", g.hi}, {"step", g.step}};
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void prepare_out_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

// Maps library errors to exit codes and keeps messages on the log stream.
template <typename Fn>
int guarded(std::ostream &log, Fn fn) {
  try {
    return fn();
  } catch (const Error &e) {
    log << "vadcal: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    log << "vadcal: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

Cohort load(const RunConfig &cfg, std::ostream &log) {
  Cohort c = load_cohort(cfg.manifest, cfg.jobs);
  for (const auto &w : c.warnings) log << "vadcal: warning: " << w << "\n";
  return c;
}

std::string rates_csv(const std::vector<std::vector<RateReport>> &per_session,
                      const Cohort &cohort) {
  std::ostringstream os;
  os << "session_id,group,window_index,window_start,window_end,role,threshold,"
        "fn_frames,fp_frames,true_speech_frames,true_nonspeech_frames,fnr,fpr\n";
  for (std::size_t s = 0; s < per_session.size(); ++s) {
    for (const auto &r : per_session[s]) {
      os << r.session_id << ',' << group_name(cohort.bundles[s].meta.group) << ','
         << *r.window_index << ',' << num(r.window->start) << ',' << num(r.window->end)
         << ',' << role_label(r.role_filter) << ',' << num(r.threshold) << ','
         << r.counts.fn_frames << ',' << r.counts.fp_frames << ','
         << r.counts.true_speech_frames << ',' << r.counts.true_nonspeech_frames << ','
         << num(r.fnr) << ',' << num(r.fpr) << '\n';
    }
  }
  return os.str();
}

std::string rates_json(const std::vector<std::vector<RateReport>> &per_session,
                       const Cohort &cohort, const RunConfig &cfg) {
  ojson rows = ojson::array();
  for (std::size_t s = 0; s < per_session.size(); ++s) {
    for (const auto &r : per_session[s]) {
      rows.push_back({{"session_id", r.session_id},
                      {"group", group_name(cohort.bundles[s].meta.group)},
                      {"window_index", *r.window_index},
                      {"window_start", r.window->start},
                      {"window_end", r.window->end},
                      {"role", role_label(r.role_filter)},
                      {"threshold", r.threshold},
                      {"fn_frames", r.counts.fn_frames},
                      {"fp_frames", r.counts.fp_frames},
                      {"true_speech_frames", r.counts.true_speech_frames},
                      {"true_nonspeech_frames", r.counts.true_nonspeech_frames},
                      {"fnr", jnum(r.fnr)},
                      {"fpr", jnum(r.fpr)}});
    }
  }
  ojson doc = {{"schema_version", kReportSchemaVersion},
               {"threshold", cfg.threshold},
               {"window_len", cfg.window_len},
               {"rates", std::move(rows)}};
  return doc.dump(2) + "\n";
}

}  // namespace

void RunConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw DomainError("--threshold must lie in [0, 1]");
  if (!(window_len > 0.0)) throw DomainError("--window-len must be positive");
  if (t_max == 0) throw DomainError("--t-max must be at least 1");
  grid.validate();
  post.validate();
}

// evaluate ---------------------------------------------------------------

int cmd_evaluate(const RunConfig &cfg, std::ostream &log) {
  return guarded(log, [&] {
    cfg.validate();
    Cohort cohort = load(cfg, log);
    const std::size_t n = cohort.bundles.size();

    struct SessionResult {
      std::vector<RateReport> reports;
      std::optional<double> child_fnr;  // per severity_fnr mode
    };
    std::vector<SessionResult> results(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
      PreparedSession session(cohort.bundles[i], cfg.window_len);
      auto &res = results[i];
      for (auto role : kRoleFilters) {
        auto reports = windowed_rates(session, cfg.threshold, role, cfg.post);
        if (role == Role::Child) {
          if (cfg.severity_fnr == SeverityFnr::Pooled) {
            res.child_fnr = session_rates(session, cfg.threshold, role, cfg.post).fnr;
          } else {
            std::vector<double> v;
            for (const auto &r : reports)
              if (r.fnr) v.push_back(*r.fnr);
            if (!v.empty()) res.child_fnr = summarize(v).mean;
          }
        }
        res.reports.insert(res.reports.end(), reports.begin(), reports.end());
      }
    });

    std::vector<std::vector<RateReport>> per_session;
    for (auto &r : results) per_session.push_back(r.reports);

    // Per group and role distributions.
    ojson groups = ojson::array();
    for (Group g : {Group::Patient, Group::Control}) {
      for (auto role : kRoleFilters) {
        std::vector<double> fnr, fpr;
        std::size_t windows = 0;
        for (std::size_t s = 0; s < n; ++s) {
          if (cohort.bundles[s].meta.group != g) continue;
          for (const auto &r : per_session[s]) {
            if (r.role_filter != role) continue;
            ++windows;
            if (r.fnr) fnr.push_back(*r.fnr);
            if (r.fpr) fpr.push_back(*r.fpr);
          }
        }
        if (windows == 0) continue;
        groups.push_back({{"group", group_name(g)},
                          {"role", role_label(role)},
                          {"n_windows", windows},
                          {"n_undefined_fnr", windows - fnr.size()},
                          {"n_undefined_fpr", windows - fpr.size()},
                          {"fnr", fnr.empty() ? ojson(nullptr) : to_json(summarize(fnr))},
                          {"fpr", fpr.empty() ? ojson(nullptr) : to_json(summarize(fpr))}});
      }
    }

    // Severity against child FNR for patients.
    std::vector<SeverityPoint> points;
    std::vector<const SessionBundle *> who;
    for (std::size_t s = 0; s < n; ++s) {
      const auto &b = cohort.bundles[s];
      if (b.meta.group == Group::Patient && b.meta.severity && results[s].child_fnr) {
        points.push_back({b.meta.severity->total, *results[s].child_fnr});
        who.push_back(&b);
      }
    }
    ojson severity = nullptr;
    if (points.size() >= 2) {
      CorrelationResult cr = severity_correlation(points);
      ojson rows = ojson::array();
      for (std::size_t i = 0; i < points.size(); ++i)
        rows.push_back({{"session_id", who[i]->session_id()},
                        {"severity_total", *points[i].severity},
                        {"severity_band", severity_band_name(severity_band(*points[i].severity))},
                        {"child_fnr", points[i].fnr},
                        {"normalized_severity", cr.normalized_severity[i]}});
      severity = {{"fnr_mode", cfg.severity_fnr == SeverityFnr::Pooled ? "pooled" : "window-mean"},
                  {"n", cr.n},
                  {"spearman_rho", jnum(cr.spearman_rho)},
                  {"pearson_r", jnum(cr.pearson_r)},
                  {"sessions", std::move(rows)}};
    }

    ojson gdoc = {{"schema_version", kReportSchemaVersion},
                  {"threshold", cfg.threshold},
                  {"window_len", cfg.window_len},
                  {"post_process", {{"min_speech", cfg.post.min_speech},
                                    {"min_gap", cfg.post.min_gap}}},
                  {"groups", std::move(groups)},
                  {"severity_correlation", std::move(severity)}};

    prepare_out_dir(cfg.out_dir);
    if (cfg.format == ReportFormat::Csv)
      write_file(cfg.out_dir / "rates.csv", rates_csv(per_session, cohort));
    else
      write_file(cfg.out_dir / "rates.json", rates_json(per_session, cohort, cfg));
    write_file(cfg.out_dir / "groups.json", gdoc.dump(2) + "\n");
    log << "vadcal: evaluated " << n << " sessions at threshold " << num(cfg.threshold)
        << " (" << kernels::isa_name(kernels::active_isa()) << " kernels)\n";
    return kExitOk;
  });
}

// adapt -----------------------------------------------------------------

int cmd_adapt(const RunConfig &cfg, std::ostream &log) {
  return guarded(log, [&] {
    cfg.validate();
    Cohort cohort = load(cfg, log);
    const std::size_t n = cohort.bundles.size();

    struct SessionResult {
      std::optional<AdaptationCurve> curve;
      std::string skipped;
      std::vector<RateReport> defaults, adapted;
    };
    std::vector<SessionResult> results(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
      PreparedSession session(cohort.bundles[i], cfg.window_len);
      auto &res = results[i];
      try {
        res.curve = few_instance_adapt(session, cfg.t_max, cfg.grid);
      } catch (const SizeError &e) {
        res.skipped = e.what();
        return;
      }
      auto valid = validation_windows(session.windows().size(), cfg.t_max);
      double adapted_th = res.curve->points.back().threshold;
      for (auto role : kRoleFilters) {
        auto d = windowed_rates(session, cfg.threshold, role);
        auto a = windowed_rates(session, adapted_th, role);
        for (std::size_t w : valid) {
          res.defaults.push_back(d[w]);
          res.adapted.push_back(a[w]);
        }
      }
    });

    std::vector<AdaptationCurve> curves;
    std::vector<RateReport> defaults, adapted;
    std::map<std::string, Group> groups;
    for (std::size_t i = 0; i < n; ++i) {
      auto &res = results[i];
      if (!res.curve) {
        log << "vadcal: warning: skipping " << res.skipped << "\n";
        continue;
      }
      curves.push_back(*res.curve);
      defaults.insert(defaults.end(), res.defaults.begin(), res.defaults.end());
      adapted.insert(adapted.end(), res.adapted.begin(), res.adapted.end());
      groups[res.curve->session_id] = res.curve->group;
    }
    if (curves.empty()) {
      log << "vadcal: error: no session has the " << 2 * cfg.t_max
          << " windows adaptation needs\n";
      return kExitInput;
    }

    std::ostringstream cc;
    cc << "session_id,group,T,adapted_threshold,train_objective,objective_flagged,"
          "train_fnr,train_fpr,valid_fnr,valid_fpr\n";
    for (const auto &c : curves)
      for (const auto &p : c.points)
        cc << c.session_id << ',' << group_name(c.group) << ',' << p.train_windows << ','
           << num(p.threshold) << ',' << num(p.train_objective.value) << ','
           << (p.train_objective.flagged() ? 1 : 0) << ',' << num(p.train_fnr) << ','
           << num(p.train_fpr) << ',' << num(p.valid_fnr) << ',' << num(p.valid_fpr)
           << '\n';

    ojson agg = ojson::object();
    for (const auto &[g, rows] : curve_aggregate(curves)) {
      ojson list = ojson::array();
      for (const auto &r : rows)
        list.push_back({{"T", r.train_windows},
                        {"threshold", to_json(r.threshold)},
                        {"train_fnr", to_json(r.train_fnr)},
                        {"valid_fnr", to_json(r.valid_fnr)}});
      agg[std::string(group_name(g))] = std::move(list);
    }
    ojson adoc = {{"schema_version", kReportSchemaVersion},
                  {"t_max", cfg.t_max},
                  {"window_len", cfg.window_len},
                  {"grid", grid_json(cfg.grid)},
                  {"default_threshold", cfg.threshold},
                  {"groups", std::move(agg)}};

    ImprovementResult imp = improvement(defaults, adapted, groups);
    std::ostringstream ic;
    ic << "group,role,n,median,q1,q3,iqr,mean,min,max\n";
    for (const auto &[cell, s] : imp.cells)
      ic << group_name(cell.group) << ',' << role_label(cell.role) << ',' << s.n << ','
         << num(s.median) << ',' << num(s.q1) << ',' << num(s.q3) << ',' << num(s.iqr)
         << ',' << num(s.mean) << ',' << num(s.min) << ',' << num(s.max) << '\n';
    std::ostringstream ip;
    ip << "session_id,group,role,window_index,fnr_default,fnr_adapted,delta\n";
    for (const auto &p : imp.pairs)
      ip << p.session_id << ',' << group_name(p.cell.group) << ',' << role_label(p.cell.role)
         << ',' << p.window_index << ',' << num(p.fnr_default) << ','
         << num(p.fnr_adapted) << ',' << num(p.delta()) << '\n';

    prepare_out_dir(cfg.out_dir);
    write_file(cfg.out_dir / "curves.csv", cc.str());
    write_file(cfg.out_dir / "curve_agg.json", adoc.dump(2) + "\n");
    write_file(cfg.out_dir / "improvement.csv", ic.str());
    write_file(cfg.out_dir / "improvement_pairs.csv", ip.str());
    log << "vadcal: adapted " << curves.size() << " of " << n << " sessions\n";
    return kExitOk;
  });
}

// sweep -----------------------------------------------------------------

int cmd_sweep(const RunConfig &cfg, std::ostream &log) {
  return guarded(log, [&] {
    cfg.validate();
    Cohort cohort = load(cfg, log);
    const std::size_t n = cohort.bundles.size();
    std::vector<std::vector<OracleWindow>> rows(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
      PreparedSession session(cohort.bundles[i], cfg.window_len);
      rows[i] = per_window_oracle(session, cfg.grid, cfg.threshold);
    });
    std::ostringstream os;
    os << "session_id,group,window_index,window_start,window_end,threshold,objective,"
          "objective_flagged,fnr_default,fnr_adapted,delta\n";
    for (std::size_t i = 0; i < n; ++i)
      for (const auto &r : rows[i])
        os << cohort.bundles[i].session_id() << ','
           << group_name(cohort.bundles[i].meta.group) << ',' << r.index << ','
           << num(r.window.start) << ',' << num(r.window.end) << ',' << num(r.threshold)
           << ',' << num(r.objective.value) << ',' << (r.objective.flagged() ? 1 : 0)
           << ',' << num(r.fnr_default) << ',' << num(r.fnr_adapted) << ','
           << num(r.delta()) << '\n';
    prepare_out_dir(cfg.out_dir);
    write_file(cfg.out_dir / "oracle.csv", os.str());
    log << "vadcal: swept " << n << " sessions\n";
    return kExitOk;
  });
}

// synth -----------------------------------------------------------------

int cmd_synth(const SynthRun &run, std::ostream &log) {
  return guarded(log, [&] {
    std::vector<SynthConfig> configs =
        run.spec ? parse_cohort_spec(read_file(*run.spec)) : reference_cohort();
    if (run.seed) reseed(configs, *run.seed);
    auto entries = generate_cohort(configs, run.out_dir, run.jobs);
    log << "vadcal: wrote " << entries.size() << " sessions to " << run.out_dir.string()
        << "\n";
    return kExitOk;
  });
}

// argument parsing ------------------------------------------------------

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &log) {
  CLI::App app{"Voice-activity score evaluation and threshold calibration", "vadcal"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string grid_text = "0:1:0.01", format = "csv", severity_mode = "pooled";

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--manifest", cfg.manifest, "Session manifest (JSON)")->required();
    sub->add_option("--threshold", cfg.threshold, "Default threshold")->capture_default_str();
    sub->add_option("--window-len", cfg.window_len, "Window length in seconds")
        ->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "Parallel sessions")->capture_default_str();
  };
  auto add_grid = [&](CLI::App *sub) {
    sub->add_option("--grid", grid_text, "Threshold grid lo:hi:step")->capture_default_str();
  };

  auto *evaluate = app.add_subcommand("evaluate", "Windowed FNR/FPR per session and role");
  add_common(evaluate);
  evaluate->add_option("--post-min-speech", cfg.post.min_speech,
                       "Drop speech runs shorter than this (s)");
  evaluate->add_option("--post-min-gap", cfg.post.min_gap,
                       "Fill gaps shorter than this (s)");
  evaluate->add_option("--format", format, "Rates report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  evaluate->add_option("--severity-fnr", severity_mode, "Per-patient FNR for correlation")
      ->check(CLI::IsMember({"pooled", "window-mean"}))
      ->capture_default_str();

  auto *adapt = app.add_subcommand("adapt", "Few-instance threshold adaptation");
  add_common(adapt);
  add_grid(adapt);
  adapt->add_option("--t-max", cfg.t_max, "Training windows")->capture_default_str();

  auto *sweep = app.add_subcommand("sweep", "Per-window oracle thresholds");
  add_common(sweep);
  add_grid(sweep);

  SynthRun synth;
  std::uint64_t seed = 0;
  std::string spec;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic cohort");
  synth_cmd->add_option("--spec", spec, "Cohort spec (JSON); reference cohort if omitted");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  auto *seed_opt = synth_cmd->add_option("--seed", seed, "Re-derive every session seed");
  synth_cmd->add_option("--jobs", synth.jobs, "Parallel sessions");

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    log << "vadcal: " << e.what() << "\n";
    return kExitInput;
  }

  if (*synth_cmd) {
    if (!spec.empty()) synth.spec = spec;
    if (*seed_opt) synth.seed = seed;
    return cmd_synth(synth, log);
  }

  int rc = guarded(log, [&] {
    cfg.grid = ThresholdGrid::parse(grid_text);
    cfg.format = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
    cfg.severity_fnr = severity_mode == "window-mean" ? SeverityFnr::WindowMean
                                                      : SeverityFnr::Pooled;
    return kExitOk;
  });
  if (rc != kExitOk) return rc;
  if (*evaluate) return cmd_evaluate(cfg, log);
  if (*adapt) return cmd_adapt(cfg, log);
  return cmd_sweep(cfg, log);
}

}  // namespace vadcal
