// src/kernels/kernels_dispatch.cc

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

#include <cstdlib>
#include <string>

#include "vadcal/error.h"
#include "vadcal/kernels.h"

namespace vadcal::kernels {

namespace {

struct Table {
  Isa isa;
  void (*threshold)(std::span<const double>, double, std::span<Label>);
  Counts (*count_scores)(std::span<const double>, std::span<const Truth>, double);
  Counts (*count_labels)(std::span<const Truth>, std::span<const Label>);
};

const Table &table() {
  static const Table t = [] {
    const char *env = std::getenv("VADCAL_ISA");
    bool force_scalar = env && std::string(env) == "scalar";
    if (!force_scalar && avx2::supported())
      return Table{Isa::Avx2, &avx2::threshold, &avx2::count_scores,
                   &avx2::count_labels};
    return Table{Isa::Scalar, &scalar::threshold, &scalar::count_scores,
                 &scalar::count_labels};
  }();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void threshold(std::span<const double> scores, double th,
               std::span<Label> out) {
  if (out.size() != scores.size())
    throw AlignmentError("threshold: output size differs from score count");
  table().threshold(scores, th, out);
}

Counts count_scores(std::span<const double> scores,
                    std::span<const Truth> truth, double th) {
  if (truth.size() != scores.size())
    throw AlignmentError("count_scores: truth size differs from score count");
  return table().count_scores(scores, truth, th);
}

Counts count_labels(std::span<const Truth> truth, std::span<const Label> pred) {
  if (truth.size() != pred.size())
    throw AlignmentError("count_labels: prediction length " +
                         std::to_string(pred.size()) + " != reference length " +
                         std::to_string(truth.size()));
  return table().count_labels(truth, pred);
}

}  // namespace vadcal::kernels
