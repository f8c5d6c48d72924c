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

#include <optional>
#include <vector>

#include "qrask/momentum.hpp"
#include "qrask/numeric.hpp"

namespace qrask {

enum class StopReason { max_iter, err_tol, dp, me };

const char* to_string(StopReason r) noexcept;

/// Per-iteration history of one solver run.
///
/// Entry k describes iterate x_k; every array has stop_index + 1 entries.
/// alpha/w/branch at k are the parameters of the step x_k -> x_{k+1} (NaN /
/// nullopt when no step was taken from x_k). me_rhs and v_norm at k are the
/// ME quantities S_k and ||y_k - y_{k-1}|| of the step that produced x_k
/// (NaN at k = 0).
struct RunRecord {
  std::vector<double> rel_error;      ///< ||x_k - x^||/||x^||, empty without truth
  std::vector<double> bregman_error;  ///< D_f^{x*_k}(x_k, x^), empty without truth
  std::vector<double> residual_norm;  ///< ||A x_k - b~||
  std::vector<double> alpha;
  std::vector<double> w;
  std::vector<std::optional<StepBranch>> branch;
  std::vector<double> me_rhs;
  std::vector<double> v_norm;

  StopReason stop_reason = StopReason::max_iter;
  Index stop_index = 0;
  double wall_seconds = 0.0;
  Index clamp_events = 0;

  Vector x;       ///< iterate at stop_index
  Vector x_star;  ///< its dual image A^T y

  bool has_truth() const noexcept { return !rel_error.empty(); }
  Index iterations() const noexcept { return stop_index; }
};

}  // namespace qrask
