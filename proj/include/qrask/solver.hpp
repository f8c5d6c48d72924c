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

// Iteration driver for the sparse Kaczmarz family.
//
//   rask              uniform row, unit step
//   rask_mm           uniform row, adaptive step and heavy-ball weight
//   quantile_rask     row drawn from the q-fraction of smallest residuals
//   quantile_rask_mm  both
//
// lambda = 0 turns each method into its plain Kaczmarz counterpart.

#include <span>
#include <string>
#include <vector>

#include "qrask/kernels.hpp"
#include "qrask/momentum.hpp"
#include "qrask/problems.hpp"
#include "qrask/run_record.hpp"
#include "qrask/sampling.hpp"
#include "qrask/stopping.hpp"

namespace qrask {

enum class Method { rask, rask_mm, quantile_rask, quantile_rask_mm };

const char* to_string(Method m) noexcept;
/// Accepts "rask", "rask-mm", "quantile-rask", "quantile-rask-mm" (or with '_').
Method parse_method(const std::string& s);
bool uses_momentum(Method m) noexcept;
bool uses_quantile(Method m) noexcept;

inline constexpr Index kDefaultRefreshPeriod = 1000;

struct SolverConfig {
  Method method = Method::rask_mm;
  double lambda = 1.0;
  double gamma = 0.0;
  double q = 1.0;
  Index max_iter = 20000;
  /// Stop once ||x_k - x^|| / ||x^|| < err_tol (0 disables).
  double err_tol = 1e-6;
  std::uint64_t seed = 0;
  StopConfig stop;
  /// x* = A^T y is recomputed from scratch every refresh_period steps.
  Index refresh_period = kDefaultRefreshPeriod;
  kernels::Exec exec = kernels::Exec::automatic;

  /// Throws ValidationError for out-of-range values; returns warnings for
  /// settings that are legal but probably unintended for this problem.
  std::vector<std::string> validate(const Problem* problem = nullptr) const;
};

/// Iterate of the method. x_star tracks A^T y incrementally.
///
/// The differences v = y - y_prev and its image A^T v are stored rather than
/// formed by subtraction: with momentum weights near 1 the subtraction loses
/// the digits the next step depends on, and the lost digits then grow.
struct IterState {
  Vector x;
  Vector x_star;
  Vector x_star_diff;  ///< A^T v
  Vector y;
  Vector y_prev;
  Vector v;            ///< y - y_prev
  Vector residual;     ///< A x - b~
  Index k = 0;

  /// x_0 = x*_0 = 0, y_0 = y_{-1} = 0, residual = -b~.
  static IterState zero(Index m, Index n, std::span<const double> b_tilde);
};

/// Everything decided about the step x_k -> x_{k+1} before it is applied.
struct StepPlan {
  Index i_k = 0;
  MomentumScalars scalars;
  StepChoice choice;
  double me_rhs = 0.0;       ///< S_{k+1}
  double v_next_norm = 0.0;  ///< ||y_{k+1} - y_k||
};

/// Scratch buffers reused across steps.
class StepWorkspace {
 public:
  AcceptableSetSelector selector;
};

/// Samples i_k and computes (alpha, w) and the ME quantities. Does not modify
/// the state apart from advancing rng.
StepPlan plan_step(const IterState& s, const RowMatrix& A, const SolverConfig& cfg,
                   double spec_norm_sq, RngStream& rng, StepWorkspace& ws);

/// Applies a plan: updates y, x*, x and the residual, and increments k.
void apply_step(IterState& s, const RowMatrix& A, std::span<const double> b_tilde,
                const SolverConfig& cfg, const StepPlan& plan);

/// plan_step followed by apply_step.
StepPlan step(IterState& s, const RowMatrix& A, std::span<const double> b_tilde,
              const SolverConfig& cfg, RngStream& rng, StepWorkspace& ws);

/// ||x* - A^T y||.
double dual_drift(const IterState& s, const RowMatrix& A);

/// Runs until the selected rule fires or k = max_iter. Metrics needing the
/// truth are recorded only when the problem has one. A NaN stop delta is
/// replaced by the problem's contamination level.
RunRecord run(const Problem& problem, const SolverConfig& cfg);

}  // namespace qrask
