// src/kernels/kernels_avx2.cc

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

// Compiled without -mavx2; each function opts in through the target
// attribute so the rest of the library stays runnable on any x86-64.

#include "vadcal/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)
#define VADCAL_X86 1
#include <immintrin.h>
#else
#define VADCAL_X86 0
#endif

namespace vadcal::kernels::avx2 {

#if VADCAL_X86

#define VADCAL_AVX2 __attribute__((target("avx2,popcnt")))

namespace {

// 16 consecutive "score > th" results as a bit mask, bit j = frame j.
VADCAL_AVX2 inline unsigned gt_mask16(const double *s, __m256d thv) {
  unsigned m0 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(s), thv, _CMP_GT_OQ));
  unsigned m1 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(s + 4), thv, _CMP_GT_OQ));
  unsigned m2 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(s + 8), thv, _CMP_GT_OQ));
  unsigned m3 = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(s + 12), thv, _CMP_GT_OQ));
  return m0 | (m1 << 4) | (m2 << 8) | (m3 << 12);
}

VADCAL_AVX2 inline unsigned popcount(unsigned v) {
  return static_cast<unsigned>(_mm_popcnt_u32(v));
}

}  // namespace

bool supported() {
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  }();
  return ok;
}

VADCAL_AVX2 void threshold(std::span<const double> scores, double th,
                           std::span<Label> out) {
  const std::size_t n = scores.size();
  const double *s = scores.data();
  auto *o = reinterpret_cast<std::uint8_t *>(out.data());
  const __m256d thv = _mm256_set1_pd(th);
  // Broadcast mask byte 0 into lanes 0-7 and byte 1 into lanes 8-15, then
  // test each lane's own bit.
  const __m128i spread = _mm_setr_epi8(0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1);
  const __m128i bitsel = _mm_setr_epi8(1, 2, 4, 8, 16, 32, 64, -128, 1, 2, 4, 8,
                                       16, 32, 64, -128);
  const __m128i one = _mm_set1_epi8(1);
  std::size_t k = 0;
  for (; k + 16 <= n; k += 16) {
    unsigned m = gt_mask16(s + k, thv);
    __m128i v = _mm_shuffle_epi8(_mm_cvtsi32_si128(static_cast<int>(m)), spread);
    v = _mm_cmpeq_epi8(_mm_and_si128(v, bitsel), bitsel);
    _mm_storeu_si128(reinterpret_cast<__m128i *>(o + k), _mm_and_si128(v, one));
  }
  for (; k < n; ++k) o[k] = s[k] > th ? 1 : 0;
}

VADCAL_AVX2 Counts count_scores(std::span<const double> scores,
                                std::span<const Truth> truth, double th) {
  const std::size_t n = scores.size();
  const double *s = scores.data();
  const auto *t = reinterpret_cast<const std::uint8_t *>(truth.data());
  const __m256d thv = _mm256_set1_pd(th);
  const __m128i speech = _mm_set1_epi8(static_cast<char>(Truth::Speech));
  const __m128i nonspeech = _mm_set1_epi8(static_cast<char>(Truth::NonSpeech));
  Counts c;
  std::size_t k = 0;
  for (; k + 16 <= n; k += 16) {
    unsigned pred = gt_mask16(s + k, thv);
    __m128i tv = _mm_loadu_si128(reinterpret_cast<const __m128i *>(t + k));
    unsigned sp = static_cast<unsigned>(_mm_movemask_epi8(_mm_cmpeq_epi8(tv, speech)));
    unsigned ns = static_cast<unsigned>(_mm_movemask_epi8(_mm_cmpeq_epi8(tv, nonspeech)));
    c.fn += popcount(sp & ~pred);
    c.fp += popcount(ns & pred);
    c.true_speech += popcount(sp);
    c.true_nonspeech += popcount(ns);
  }
  c += scalar::count_scores(scores.subspan(k), truth.subspan(k), th);
  return c;
}

VADCAL_AVX2 Counts count_labels(std::span<const Truth> truth,
                                std::span<const Label> pred) {
  const std::size_t n = truth.size();
  const auto *t = reinterpret_cast<const std::uint8_t *>(truth.data());
  const auto *p = reinterpret_cast<const std::uint8_t *>(pred.data());
  const __m256i speech = _mm256_set1_epi8(static_cast<char>(Truth::Speech));
  const __m256i nonspeech = _mm256_set1_epi8(static_cast<char>(Truth::NonSpeech));
  const __m256i said = _mm256_set1_epi8(static_cast<char>(Label::Speech));
  Counts c;
  std::size_t k = 0;
  for (; k + 32 <= n; k += 32) {
    __m256i tv = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(t + k));
    __m256i pv = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(p + k));
    auto sp = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(tv, speech)));
    auto ns = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(tv, nonspeech)));
    auto pr = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(pv, said)));
    c.fn += popcount(sp & ~pr);
    c.fp += popcount(ns & pr);
    c.true_speech += popcount(sp);
    c.true_nonspeech += popcount(ns);
  }
  c += scalar::count_labels(truth.subspan(k), pred.subspan(k));
  return c;
}

#else  // !VADCAL_X86

bool supported() { return false; }

void threshold(std::span<const double> scores, double th, std::span<Label> out) {
  scalar::threshold(scores, th, out);
}
Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double th) {
  return scalar::count_scores(scores, truth, th);
}
Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred) {
  return scalar::count_labels(truth, pred);
}

#endif

}  // namespace vadcal::kernels::avx2
