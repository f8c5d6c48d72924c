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

#include "qrask/stopping.hpp"

#include <algorithm>
#include <cmath>

#include "qrask/error.hpp"

namespace qrask {

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::max_iter:
      return "max_iter";
    case StopReason::err_tol:
      return "err_tol";
    case StopReason::dp:
      return "dp";
    case StopReason::me:
      return "me";
  }
  return "?";
}

const char* to_string(StopKind k) noexcept {
  switch (k) {
    case StopKind::max_iter_only:
      return "none";
    case StopKind::err_tol:
      return "errtol";
    case StopKind::dp:
      return "dp";
    case StopKind::me:
      return "me";
  }
  return "?";
}

StopKind parse_stop_kind(const std::string& s) {
  if (s == "none" || s == "maxiter") return StopKind::max_iter_only;
  if (s == "errtol") return StopKind::err_tol;
  if (s == "dp") return StopKind::dp;
  if (s == "me") return StopKind::me;
  throw ValidationError("unknown stopping rule '" + s + "' (none, errtol, dp, me)");
}

void StopConfig::validate() const {
  if (!std::isnan(delta) && !(delta >= 0.0 && std::isfinite(delta))) {
    throw ValidationError("delta must be >= 0");
  }
  if (kind == StopKind::dp && !(tau >= 1.0)) throw ValidationError("dp requires tau >= 1");
  if (kind == StopKind::me && !(tau >= 0.0 && tau <= 1.0)) {
    throw ValidationError("me requires tau in [0, 1]");
  }
}

bool dp_should_stop(double residual_norm, double tau, double delta) noexcept {
  return residual_norm <= tau * delta;
}

double me_threshold(const MomentumScalars& sc, const StepChoice& step, double L) noexcept {
  const double a = step.alpha;
  const double w = step.w;
  return -0.5 * L * w * w * sc.s2 - w * (sc.s4 - a * L * sc.s1_ik * sc.s3) +
         (a - 0.5 * L * a * a) * sc.s1_ik * sc.s1_ik;
}

bool me_should_stop(double v_next_norm, double s_next, double tau, double delta) noexcept {
  return tau * delta * v_next_norm >= s_next;
}

double train_tau(const RunRecord& pilot, double delta, TauRule rule) {
  if (!(delta > 0.0)) throw ValidationError("train_tau needs delta > 0");
  if (!pilot.has_truth()) throw ValidationError("train_tau needs a pilot run with known truth");
  const auto& err = pilot.bregman_error;
  const auto best = static_cast<Index>(std::min_element(err.begin(), err.end()) - err.begin());
  if (best == 0) throw DegenerateTrajectory("Bregman error is minimal at the initial iterate");
  if (rule == TauRule::dp) {
    return (pilot.residual_norm[best] + pilot.residual_norm[best - 1]) / (2.0 * delta);
  }
  auto ratio = [&](Index k) { return pilot.me_rhs[k] / pilot.v_norm[k]; };
  // S_0 / ||v_0|| does not exist (no step produced x_0); reuse the k* term.
  const double prev = best >= 2 ? ratio(best - 1) : ratio(best);
  return (ratio(best) + prev) / (2.0 * delta);
}

}  // namespace qrask
