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

// Stopping rules. max_iter is always active; the selected kind adds one rule
// on top (dp and me also honour a positive error tolerance when the truth is
// known).
//
//   dp: stop at the first k with ||A x_k - b~|| <= tau * delta   (tau >= 1)
//   me: stop at the first k with tau * delta * ||v_{k+1}|| >= S_{k+1}, the
//       guaranteed Bregman descent of the step k -> k+1       (0 <= tau <= 1)

#include <limits>
#include <string>

#include "qrask/momentum.hpp"
#include "qrask/run_record.hpp"

namespace qrask {

enum class StopKind { max_iter_only, err_tol, dp, me };

const char* to_string(StopKind k) noexcept;
StopKind parse_stop_kind(const std::string& s);

struct StopConfig {
  StopKind kind = StopKind::err_tol;
  double tau = 1.0;
  /// Contamination level ||b~ - b||; NaN takes it from the problem.
  double delta = std::numeric_limits<double>::quiet_NaN();

  /// Throws ValidationError for tau outside the rule's range or negative delta.
  void validate() const;
};

bool dp_should_stop(double residual_norm, double tau, double delta) noexcept;

/// S_{k+1} = -(L/2) w^2 s2 - w (s4 - alpha L s1 s3) + (alpha - (L/2) alpha^2) s1^2
/// with L = ||A||_2^2.
double me_threshold(const MomentumScalars& sc, const StepChoice& step, double spec_norm_sq) noexcept;

bool me_should_stop(double v_next_norm, double s_next, double tau, double delta) noexcept;

enum class TauRule { dp, me };

/// Averages the rule's ratio over the error-minimising index k* and k* - 1 of
/// a pilot run, divided by 2 delta. Throws DegenerateTrajectory when the
/// recorded Bregman error is minimal at k = 0, and ValidationError without
/// truth or for delta <= 0.
double train_tau(const RunRecord& pilot, double delta, TauRule rule);

}  // namespace qrask
