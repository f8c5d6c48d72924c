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

#include "qrask/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "qrask/bregman.hpp"
#include "qrask/error.hpp"

namespace qrask {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::rask:
      return "rask";
    case Method::rask_mm:
      return "rask-mm";
    case Method::quantile_rask:
      return "quantile-rask";
    case Method::quantile_rask_mm:
      return "quantile-rask-mm";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "rask") return Method::rask;
  if (t == "rask-mm") return Method::rask_mm;
  if (t == "quantile-rask") return Method::quantile_rask;
  if (t == "quantile-rask-mm") return Method::quantile_rask_mm;
  throw ValidationError("unknown method '" + s +
                        "' (rask, rask-mm, quantile-rask, quantile-rask-mm)");
}

bool uses_momentum(Method m) noexcept { return m == Method::rask_mm || m == Method::quantile_rask_mm; }
bool uses_quantile(Method m) noexcept {
  return m == Method::quantile_rask || m == Method::quantile_rask_mm;
}

std::vector<std::string> SolverConfig::validate(const Problem* problem) const {
  std::vector<std::string> warnings;
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 0");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("q must lie in (0, 1]");
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
  if (!(err_tol >= 0.0)) throw ValidationError("err_tol must be >= 0");
  if (refresh_period < 1) throw ValidationError("refresh_period must be positive");
  stop.validate();
  if (uses_quantile(method) && q == 1.0) {
    warnings.emplace_back("q = 1 makes " + std::string(to_string(method)) +
                          " identical to its non-quantile counterpart");
  }
  if (!uses_quantile(method) && q != 1.0) {
    warnings.emplace_back("q is ignored by " + std::string(to_string(method)));
  }
  if (problem != nullptr) {
    if (uses_momentum(method) && gamma == 0.0 &&
        problem->contamination.mode != ContaminationMode::exact) {
      warnings.emplace_back("gamma = 0 on contaminated data: the dual step has no horizon guarantee");
    }
    if (uses_quantile(method) && problem->contamination.beta > 0.0) {
      if (auto w = QuantileConfig{q, problem->contamination.beta}.validate()) warnings.push_back(*w);
    }
    if ((stop.kind == StopKind::dp || stop.kind == StopKind::me) && std::isnan(stop.delta) &&
        problem->contamination.delta == 0.0) {
      warnings.emplace_back("delta = 0: the discrepancy rules only fire in degenerate cases");
    }
  }
  return warnings;
}

IterState IterState::zero(Index m, Index n, std::span<const double> b_tilde) {
  num::require_same_size(b_tilde.size(), m, "right-hand side");
  IterState s;
  s.x.assign(n, 0.0);
  s.x_star.assign(n, 0.0);
  s.x_star_diff.assign(n, 0.0);
  s.y.assign(m, 0.0);
  s.y_prev.assign(m, 0.0);
  s.v.assign(m, 0.0);
  s.residual.resize(m);
  for (Index i = 0; i < m; ++i) s.residual[i] = -b_tilde[i];
  return s;
}

StepPlan plan_step(const IterState& s, const RowMatrix& A, const SolverConfig& cfg,
                   double spec_norm_sq, RngStream& rng, StepWorkspace& ws) {
  const Index m = A.rows();
  StepPlan plan;
  if (uses_quantile(cfg.method) && cfg.q < 1.0) {
    plan.i_k = sample_index(ws.selector.select(s.residual, cfg.q), rng);
  } else {
    plan.i_k = rng.uniform_index(m);
  }
  plan.scalars = make_scalars(s.residual, s.v, plan.i_k, 2.0 * cfg.gamma + spec_norm_sq);
  if (uses_momentum(cfg.method)) {
    plan.choice = compute_step(plan.scalars);
  } else {
    plan.choice.alpha = 1.0;
    plan.choice.w = 0.0;
    // No momentum direction is used, whatever v is.
    plan.choice.branch = StepBranch::zero_v;
  }
  plan.me_rhs = me_threshold(plan.scalars, plan.choice, spec_norm_sq);
  // y_{k+1} - y_k = w v - alpha s1_i e_i
  const double w = plan.choice.w;
  num::CompensatedSum acc;
  for (Index j = 0; j < m; ++j) {
    double d = w * s.v[j];
    if (j == plan.i_k) d -= plan.choice.alpha * plan.scalars.s1_ik;
    acc.add(d * d);
  }
  plan.v_next_norm = std::sqrt(acc.value());
  return plan;
}

void apply_step(IterState& s, const RowMatrix& A, std::span<const double> b_tilde,
                const SolverConfig& cfg, const StepPlan& plan) {
  const Index m = A.rows();
  const Index n = A.cols();
  const double w = plan.choice.w;
  const double g = plan.choice.alpha * plan.scalars.s1_ik;
  // v <- w v - g e_i, y <- y + v
  for (Index j = 0; j < m; ++j) {
    s.y_prev[j] = s.y[j];
    s.v[j] *= w;
  }
  s.v[plan.i_k] -= g;
  for (Index j = 0; j < m; ++j) s.y[j] += s.v[j];
  // A^T v <- w A^T v - g a_i, x* <- x* + A^T v
  for (Index j = 0; j < n; ++j) s.x_star_diff[j] *= w;
  A.row_axpy(plan.i_k, -g, s.x_star_diff);
  for (Index j = 0; j < n; ++j) s.x_star[j] += s.x_star_diff[j];
  ++s.k;
  if (s.k % cfg.refresh_period == 0) {
    A.matvec_t(s.y, s.x_star, cfg.exec);
    A.matvec_t(s.v, s.x_star_diff, cfg.exec);
  }
  shrink_into(s.x_star, RegParam(cfg.lambda), s.x);
  A.residual(s.x, b_tilde, s.residual, cfg.exec);
}

StepPlan step(IterState& s, const RowMatrix& A, std::span<const double> b_tilde,
              const SolverConfig& cfg, RngStream& rng, StepWorkspace& ws) {
  const StepPlan plan = plan_step(s, A, cfg, A.spectral_norm_sq(), rng, ws);
  apply_step(s, A, b_tilde, cfg, plan);
  return plan;
}

double dual_drift(const IterState& s, const RowMatrix& A) {
  return num::distance(s.x_star, A.matvec_t(s.y));
}

RunRecord run(const Problem& problem, const SolverConfig& cfg) {
  cfg.validate(&problem);
  const RowMatrix& A = problem.A;
  num::require_same_size(problem.b_tilde.size(), A.rows(), "right-hand side");
  const bool truth = problem.x_hat.has_value();
  if (truth) num::require_same_size(problem.x_hat->size(), A.cols(), "truth");
  const double delta = std::isnan(cfg.stop.delta) ? problem.contamination.delta : cfg.stop.delta;
  const StopKind kind = cfg.stop.kind;
  const bool check_err = truth && cfg.err_tol > 0.0 && kind != StopKind::max_iter_only;
  const double L = A.spectral_norm_sq();
  const RegParam lam(cfg.lambda);
  const double xhat_norm = truth ? num::norm(*problem.x_hat) : 0.0;
  if (truth && xhat_norm == 0.0) throw ValidationError("ground truth is the zero vector");

  RunRecord rec;
  const Index reserve = std::min<Index>(cfg.max_iter + 1, 1u << 20);
  rec.residual_norm.reserve(reserve);
  rec.alpha.reserve(reserve);
  rec.w.reserve(reserve);
  rec.branch.reserve(reserve);
  rec.me_rhs.reserve(reserve);
  rec.v_norm.reserve(reserve);
  if (truth) {
    rec.rel_error.reserve(reserve);
    rec.bregman_error.reserve(reserve);
  }

  IterState s = IterState::zero(A.rows(), A.cols(), problem.b_tilde);
  RngStream rng(cfg.seed);
  StepWorkspace ws;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  rec.me_rhs.push_back(nan);
  rec.v_norm.push_back(nan);

  const auto t0 = std::chrono::steady_clock::now();
  for (;;) {
    const double rnorm = num::norm(s.residual);
    rec.residual_norm.push_back(rnorm);
    double rel = nan;
    if (truth) {
      rel = num::distance(s.x, *problem.x_hat) / xhat_norm;
      rec.rel_error.push_back(rel);
      rec.bregman_error.push_back(bregman(s.x_star, s.x, *problem.x_hat, lam));
    }
    auto finish = [&](StopReason why) {
      rec.stop_reason = why;
      rec.stop_index = s.k;
      rec.alpha.push_back(nan);
      rec.w.push_back(nan);
      rec.branch.push_back(std::nullopt);
    };
    if (check_err && rel < cfg.err_tol) {
      finish(StopReason::err_tol);
      break;
    }
    if (kind == StopKind::dp && dp_should_stop(rnorm, cfg.stop.tau, delta)) {
      finish(StopReason::dp);
      break;
    }
    if (s.k >= cfg.max_iter) {
      finish(StopReason::max_iter);
      break;
    }
    const StepPlan plan = plan_step(s, A, cfg, L, rng, ws);
    // The first step carries no momentum information, so the descent
    // test starts with the step out of x_1.
    if (kind == StopKind::me && s.k >= 1 &&
        me_should_stop(plan.v_next_norm, plan.me_rhs, cfg.stop.tau, delta)) {
      finish(StopReason::me);
      break;
    }
    rec.alpha.push_back(plan.choice.alpha);
    rec.w.push_back(plan.choice.w);
    rec.branch.push_back(plan.choice.branch);
    if (plan.choice.clamped) ++rec.clamp_events;
    apply_step(s, A, problem.b_tilde, cfg, plan);
    rec.me_rhs.push_back(plan.me_rhs);
    rec.v_norm.push_back(plan.v_next_norm);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.x = std::move(s.x);
  rec.x_star = std::move(s.x_star);
  return rec;
}

}  // namespace qrask
