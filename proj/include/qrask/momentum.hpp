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

#pragma once

// Step size and heavy-ball weight chosen to minimise a quadratic upper bound
// of the perturbed dual function along span{e_i * grad_i, v}, where
// v = y_k - y_{k-1}.

#include <span>

#include "qrask/numeric.hpp"

namespace qrask {

/// Per-iteration scalars shared by the step rule and the ME stopping test.
struct MomentumScalars {
  double s1_ik = 0.0;  ///< selected residual (A x_k - b~)_{i_k}
  double s2 = 0.0;     ///< ||v||^2
  double s3 = 0.0;     ///< v_{i_k}
  double s4 = 0.0;     ///< <A x_k - b~, v>
  double c = 1.0;      ///< 2 gamma + ||A||_2^2
};

/// Builds the scalars from the full residual and the dual difference v.
MomentumScalars make_scalars(std::span<const double> residual, std::span<const double> v,
                             Index i_k, double c);

enum class StepBranch { independent, dependent_nonzero_v, zero_v };

const char* to_string(StepBranch b) noexcept;

struct StepChoice {
  double alpha = 1.0;
  double w = 0.0;
  StepBranch branch = StepBranch::zero_v;
  bool clamped = false;  ///< |w| hit kMaxMomentum
};

/// |w| is clamped to this bound.
inline constexpr double kMaxMomentum = 1e3;

/// Branch test s1^2 (s2 - s3^2) > 1e-28 (1 + s2)^2 selects the two-direction
/// minimiser; otherwise alpha = 1 and w solves the w-equation alone (or is 0
/// when v = 0). Throws NonFinite for NaN/Inf output.
StepChoice compute_step(const MomentumScalars& sc);

/// Quadratic model <d, s1> + (c/2) ||d||^2 with d = -alpha e_i s1_i + w v,
/// i.e. the upper bound minus its constant terms.
double surrogate(const MomentumScalars& sc, double alpha, double w, std::span<const double> v,
                 std::span<const double> residual, Index i_k);

}  // namespace qrask
