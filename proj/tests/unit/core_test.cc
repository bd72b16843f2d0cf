#include <random>

#include "doctest.h"
#include "oracle.h"
#include "vadcal/error.h"
#include "vadcal/timeline.h"

using namespace vadcal;

namespace {
SessionAnnotation annotation(std::vector<SpeechSegment> segs, double total) {
  SessionAnnotation a{"s", std::move(segs), total};
  a.sort_segments();
  return a;
}
constexpr Label S = Label::Speech, N = Label::NonSpeech;
}  // namespace

TEST_CASE("frame_labels uses frame-center membership") {
  auto a = annotation({{{1.0, 2.0}, Role::Clinician, ""}}, 3.0);
  LabelSeq l = frame_labels(a, 0.5, 6);
  CHECK(l.labels == std::vector<Label>{N, N, S, S, N, N});
  CHECK(l.hop == 0.5);
}

TEST_CASE("empty annotation is all non-speech") {
  auto a = annotation({}, 10.0);
  LabelSeq l = frame_labels(a, 0.01, 1000);
  CHECK(l.count_speech() == 0);
  CHECK(l.size() == 1000);
}

TEST_CASE("overlapping roles record Both") {
  auto a = annotation({{{0, 2}, Role::Clinician, ""}, {{1, 3}, Role::Child, ""}}, 3.0);
  LabelSeq l = frame_labels(a, 1.0, 3);
  REQUIRE(l.role_labels);
  CHECK(*l.role_labels ==
        std::vector<RoleCover>{RoleCover::Clinician, RoleCover::Both, RoleCover::Child});
  CHECK(l.labels == std::vector<Label>{S, S, S});

  LabelSeq child = frame_labels(a, 1.0, 3, Role::Child);
  CHECK(child.labels == std::vector<Label>{N, S, S});
  CHECK(*child.role_labels == *l.role_labels);
}

TEST_CASE("frame_labels alignment and domain errors") {
  auto a = annotation({}, 1.0);
  CHECK_NOTHROW(frame_labels(a, 0.1, 11));  // one trailing partial frame tolerated
  CHECK_THROWS_AS(frame_labels(a, 0.1, 12), AlignmentError);
  CHECK_THROWS_AS(frame_labels(a, 0.0, 5), DomainError);
}

TEST_CASE("frame_labels agrees with center enumeration on random annotations") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 100; ++it) {
    SessionBundle b = oracle::random_bundle(rng, 400);
    const auto n = b.n_frames();
    auto cov = oracle::cover(b.annotation, b.hop(), n);
    LabelSeq all = frame_labels(b.annotation, b.hop(), n);
    LabelSeq child = frame_labels(b.annotation, b.hop(), n, Role::Child);
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE(static_cast<int>((*all.role_labels)[k]) == cov[k]);
      REQUIRE((all.labels[k] == S) == (cov[k] != 0));
      REQUIRE((child.labels[k] == S) == ((cov[k] & 2) != 0));
    }
    // Idempotent for identical inputs.
    CHECK(frame_labels(b.annotation, b.hop(), n) == all);
  }
}

TEST_CASE("speech frame time approximates segment durations") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 50; ++it) {
    SessionBundle b = oracle::random_bundle(rng, 800);
    for (Role r : {Role::Clinician, Role::Child}) {
      double dur = 0.0;
      std::size_t segs = 0;
      for (const auto &s : b.annotation.segments)
        if (s.role == r) dur += s.span.duration(), ++segs;
      LabelSeq l = frame_labels(b.annotation, b.hop(), b.n_frames(), r);
      double got = static_cast<double>(l.count_speech()) * b.hop();
      CHECK(std::abs(got - dur) <= 2.0 * b.hop() * static_cast<double>(segs) + 1e-9);
    }
  }
}

TEST_CASE("frames_in partitions frames across contiguous windows") {
  auto w = window_bounds(10.0, 2.5);
  REQUIRE(w.size() == 4);
  std::size_t expect = 0;
  for (const auto &span : w) {
    FrameRange r = frames_in(span, 0.01, 1000);
    CHECK(r.begin == expect);
    expect = r.end;
  }
  CHECK(expect == 1000);
}

TEST_CASE("window_bounds") {
  auto w = window_bounds(600.0, 60.0);
  REQUIRE(w.size() == 10);
  CHECK(w.front() == TimeSpan{0, 60});
  CHECK(w.back() == TimeSpan{540, 600});

  CHECK(window_bounds(60.0, 60.0).size() == 1);

  auto w605 = window_bounds(605.0, 60.0);
  CHECK(w605.size() == 10);
  CHECK(w605.back().end == 600.0);

  auto w630 = window_bounds(630.0, 60.0);  // 30 s remainder is exactly half: kept
  REQUIRE(w630.size() == 11);
  CHECK(w630.back() == TimeSpan{600, 630});

  CHECK(window_bounds(0.0, 60.0).empty());
  CHECK_THROWS_AS(window_bounds(600.0, 0.0), DomainError);
}

TEST_CASE("window_bounds partition without gaps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> total(1.0, 2000.0), len(0.5, 120.0);
  for (int it = 0; it < 200; ++it) {
    double t = total(rng), l = len(rng);
    auto w = window_bounds(t, l);
    double at = 0.0;
    for (const auto &span : w) {
      CHECK(span.start == at);
      CHECK(span.end > span.start);
      at = span.end;
    }
    CHECK(at <= t + 1e-9 * t);
    CHECK(t - at < 0.5 * l + 1e-9 * t);
  }
}

TEST_CASE("annotation invariants") {
  SessionAnnotation ok = annotation({{{0, 2}, Role::Clinician, ""}, {{1, 3}, Role::Child, ""}}, 3);
  CHECK_NOTHROW(ok.validate());

  SessionAnnotation same_role =
      annotation({{{0, 2}, Role::Child, ""}, {{1, 3}, Role::Child, ""}}, 3);
  CHECK_THROWS_AS(same_role.validate(), ValidationError);

  SessionAnnotation touching =
      annotation({{{0, 1}, Role::Child, ""}, {{1, 3}, Role::Child, ""}}, 3);
  CHECK_NOTHROW(touching.validate());

  SessionAnnotation outside = annotation({{{0, 4}, Role::Child, ""}}, 3);
  CHECK_THROWS_AS(outside.validate(), ValidationError);

  CHECK_THROWS_AS((TimeSpan{2, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((TimeSpan{-1, 2}.validate()), ValidationError);
}

TEST_CASE("session meta severity rules") {
  SessionMeta p{"p", Group::Patient, Severity{8, 10, 18}};
  CHECK_NOTHROW(p.validate());
  CHECK(severity_band(18) == SeverityBand::Moderate);
  CHECK(severity_band(24) == SeverityBand::Severe);
  CHECK(severity_band(40) == SeverityBand::Severe);
  CHECK(severity_band(15) == SeverityBand::Subclinical);

  SessionMeta sum{"p", Group::Patient, Severity{10, 10, 25}};
  CHECK_THROWS_AS(sum.validate(), ValidationError);
  SessionMeta range{"p", Group::Patient, Severity{21, 0, 21}};
  CHECK_THROWS_AS(range.validate(), ValidationError);
  SessionMeta control{"c", Group::Control, Severity{1, 1, 2}};
  CHECK_THROWS_AS(control.validate(), ValidationError);
  SessionMeta plain{"c", Group::Control, std::nullopt};
  CHECK_NOTHROW(plain.validate());
}

TEST_CASE("role and group names") {
  CHECK(parse_role("clinician") == Role::Clinician);
  CHECK(parse_role("CHILD") == Role::Child);
  CHECK_THROWS_AS(parse_role("parent"), MappingError);
  CHECK(parse_group("patient") == Group::Patient);
  CHECK_THROWS_AS(parse_group("x"), ValidationError);
}
