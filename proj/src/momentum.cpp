// Copyright 2026 The qrask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrask/momentum.hpp"

#include <algorithm>
#include <cmath>

#include "qrask/error.hpp"

namespace qrask {

MomentumScalars make_scalars(std::span<const double> residual, std::span<const double> v,
                             Index i_k, double c) {
  num::require_same_size(residual.size(), v.size(), "momentum scalars");
  if (i_k >= residual.size()) throw DimensionMismatch("selected row out of range");
  MomentumScalars sc;
  sc.s1_ik = residual[i_k];
  sc.s2 = num::norm_sq(v);
  sc.s3 = v[i_k];
  sc.s4 = num::dot(residual, v);
  sc.c = c;
  return sc;
}

const char* to_string(StepBranch b) noexcept {
  switch (b) {
    case StepBranch::independent:
      return "independent";
    case StepBranch::dependent_nonzero_v:
      return "dependent";
    case StepBranch::zero_v:
      return "zero_v";
  }
  return "?";
}

StepChoice compute_step(const MomentumScalars& sc) {
  StepChoice out;
  const double gap = sc.s2 - sc.s3 * sc.s3;
  const double det = sc.s1_ik * sc.s1_ik * gap;
  const double eta = 1e-28 * (1.0 + sc.s2) * (1.0 + sc.s2);
  if (det > eta) {
    out.alpha = (sc.s1_ik * sc.s2 - sc.s3 * sc.s4) / (sc.c * sc.s1_ik * gap);
    out.w = (-sc.s4 + sc.s1_ik * sc.s3) / (sc.c * gap);
    out.branch = StepBranch::independent;
  } else if (sc.s2 > 0.0) {
    out.alpha = 1.0;
    out.w = (sc.c * sc.s1_ik * sc.s3 - sc.s4) / (sc.c * sc.s2);
    out.branch = StepBranch::dependent_nonzero_v;
  } else {
    out.alpha = 1.0;
    out.w = 0.0;
    out.branch = StepBranch::zero_v;
  }
  if (!std::isfinite(out.alpha) || !std::isfinite(out.w)) {
    throw NonFinite("momentum step produced a non-finite value");
  }
  if (std::abs(out.w) > kMaxMomentum) {
    out.w = std::copysign(kMaxMomentum, out.w);
    out.clamped = true;
  }
  return out;
}

double surrogate(const MomentumScalars& sc, double alpha, double w, std::span<const double> v,
                 std::span<const double> residual, Index i_k) {
  num::require_same_size(v.size(), residual.size(), "surrogate");
  if (i_k >= v.size()) throw DimensionMismatch("selected row out of range");
  num::CompensatedSum lin, quad;
  for (Index i = 0; i < v.size(); ++i) {
    double d = w * v[i];
    if (i == i_k) d -= alpha * sc.s1_ik;
    lin.add(d * residual[i]);
    quad.add(d * d);
  }
  return lin.value() + 0.5 * sc.c * quad.value();
}

}  // namespace qrask
