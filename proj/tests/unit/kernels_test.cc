#include <random>

#include "doctest.h"
#include "vadcal/error.h"
#include "vadcal/kernels.h"

using namespace vadcal;
using kernels::Counts;

namespace {

struct Case {
  std::vector<double> scores;
  std::vector<Truth> truth;
  std::vector<Label> pred;
};

Case random_case(std::mt19937_64 &rng, std::size_t n) {
  Case c;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    double v = u(rng);
    switch (rng() % 5) {
      case 0: v = static_cast<double>(rng() % 101) / 100.0; break;  // grid ties
      case 1: v = (rng() % 2) ? 0.0 : 1.0; break;
      default: break;
    }
    c.scores.push_back(v);
    c.truth.push_back(static_cast<Truth>(rng() % 3));
    c.pred.push_back(static_cast<Label>(rng() % 2));
  }
  return c;
}

Counts direct(const Case &c, std::size_t off, double th) {
  Counts r;
  for (std::size_t k = off; k < c.scores.size(); ++k) {
    bool p = c.scores[k] > th;
    if (c.truth[k] == Truth::Speech) ++r.true_speech, r.fn += !p;
    if (c.truth[k] == Truth::NonSpeech) ++r.true_nonspeech, r.fp += p;
  }
  return r;
}

}  // namespace

TEST_CASE("scalar kernels match a direct count") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 200; ++it) {
    Case c = random_case(rng, rng() % 300);
    double th = static_cast<double>(rng() % 101) / 100.0;
    CHECK(kernels::scalar::count_scores(c.scores, c.truth, th) == direct(c, 0, th));
    std::vector<Label> out(c.scores.size());
    kernels::scalar::threshold(c.scores, th, out);
    for (std::size_t k = 0; k < out.size(); ++k)
      REQUIRE((out[k] == Label::Speech) == (c.scores[k] > th));
  }
}

TEST_CASE("avx2 kernels equal scalar kernels") {
  if (!kernels::avx2::supported()) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(2);
  const double thresholds[] = {0.0, 0.01, 0.37, 0.5, 0.99, 1.0};
  for (int it = 0; it < 400; ++it) {
    Case c = random_case(rng, rng() % 530);
    // Offsets exercise unaligned loads and every tail length.
    std::size_t off = c.scores.empty() ? 0 : rng() % std::min<std::size_t>(17, c.scores.size());
    std::span<const double> s = std::span<const double>(c.scores).subspan(off);
    std::span<const Truth> t = std::span<const Truth>(c.truth).subspan(off);
    std::span<const Label> p = std::span<const Label>(c.pred).subspan(off);
    for (double th : thresholds) {
      CHECK(kernels::avx2::count_scores(s, t, th) == kernels::scalar::count_scores(s, t, th));
      CHECK(kernels::avx2::count_scores(s, t, th) == direct(c, off, th));
      std::vector<Label> a(s.size()), b(s.size());
      kernels::avx2::threshold(s, th, a);
      kernels::scalar::threshold(s, th, b);
      CHECK(a == b);
    }
    CHECK(kernels::avx2::count_labels(t, p) == kernels::scalar::count_labels(t, p));
  }
}

TEST_CASE("dispatch checks sizes and reports its ISA") {
  std::vector<double> s(4, 0.5);
  std::vector<Truth> t(3, Truth::Speech);
  std::vector<Label> l(3, Label::Speech);
  CHECK_THROWS_AS(kernels::count_scores(s, t, 0.5), AlignmentError);
  CHECK_THROWS_AS(kernels::threshold(s, 0.5, l), AlignmentError);
  std::vector<Truth> t4(4, Truth::Speech);
  CHECK_THROWS_AS(kernels::count_labels(t4, l), AlignmentError);

  auto isa = kernels::active_isa();
  CHECK((isa == kernels::Isa::Scalar || kernels::avx2::supported()));
  CHECK(!kernels::isa_name(isa).empty());
}

TEST_CASE("strict tie rule at the boundaries") {
  std::vector<double> s = {0.0, 0.5, 1.0};
  std::vector<Truth> t(3, Truth::Speech);
  auto at0 = kernels::count_scores(s, t, 0.0);
  CHECK(at0.fn == 1);  // score 0 is not > 0
  auto at1 = kernels::count_scores(s, t, 1.0);
  CHECK(at1.fn == 3);  // nothing exceeds 1
}
