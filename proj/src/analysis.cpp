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

#include "qrask/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

#include "qrask/error.hpp"

namespace qrask {

double relative_error(std::span<const double> x, std::span<const double> x_hat) {
  num::require_same_size(x.size(), x_hat.size(), "relative error");
  const double den = num::norm(x_hat);
  if (den == 0.0) throw ValidationError("relative error against a zero truth");
  return num::distance(x, x_hat) / den;
}

double psnr(std::span<const double> img, std::span<const double> ref, double peak) {
  num::require_same_size(img.size(), ref.size(), "psnr");
  if (img.empty()) throw ValidationError("psnr of an empty image");
  const double mse = num::distance(img, ref) * num::distance(img, ref) / static_cast<double>(img.size());
  if (mse < peak * peak * 1e-20) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

Vector singular_values(const Vector& row_major, Index rows, Index cols) {
  num::require_same_size(row_major.size(), rows * cols, "matrix storage");
  // Work on the columns of a tall copy (transpose when wide).
  const bool wide = cols > rows;
  const Index r = wide ? cols : rows;
  const Index c = wide ? rows : cols;
  std::vector<Vector> u(c, Vector(r));
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (wide) {
        u[i][j] = row_major[i * cols + j];
      } else {
        u[j][i] = row_major[i * cols + j];
      }
    }
  }
  constexpr double tol = 1e-12;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < c; ++p) {
      for (Index q = p + 1; q < c; ++q) {
        const double a = num::norm_sq(u[p]);
        const double b = num::norm_sq(u[q]);
        const double g = num::dot(u[p], u[q]);
        if (std::abs(g) <= tol * std::sqrt(a * b) || g == 0.0) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (Index k = 0; k < r; ++k) {
          const double up = u[p][k];
          const double uq = u[q][k];
          u[p][k] = cs * up - sn * uq;
          u[q][k] = sn * up + cs * uq;
        }
      }
    }
    if (!rotated) break;
  }
  Vector s(c);
  for (Index j = 0; j < c; ++j) s[j] = num::norm(u[j]);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double sigma_tilde_brute(const RowMatrix& A, Index count) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (m > kBruteMaxRows || n > kBruteMaxCols) {
    throw SizeGuard("brute-force sigma needs at most " + std::to_string(kBruteMaxRows) + " x " +
                    std::to_string(kBruteMaxCols));
  }
  if (count < 1 || count > m) throw ValidationError("row subset size must lie in [1, m]");
  const Vector dense = A.to_dense();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> rows;
  for (unsigned rmask = 1; rmask < (1u << m); ++rmask) {
    if (static_cast<Index>(__builtin_popcount(rmask)) != count) continue;
    rows.clear();
    for (Index i = 0; i < m; ++i) {
      if (rmask & (1u << i)) rows.push_back(i);
    }
    for (unsigned cmask = 1; cmask < (1u << n); ++cmask) {
      std::vector<Index> cols;
      for (Index j = 0; j < n; ++j) {
        if (cmask & (1u << j)) cols.push_back(j);
      }
      Vector sub;
      sub.reserve(rows.size() * cols.size());
      for (Index i : rows) {
        for (Index j : cols) sub.push_back(dense[i * n + j]);
      }
      const Vector s = singular_values(sub, rows.size(), cols.size());
      const double smax = s.front();
      const double smin = s.back();
      if (smax > 0.0 && smin > 1e-10 * smax) best = std::min(best, smin);
    }
  }
  if (!std::isfinite(best)) throw ValidationError("every submatrix is rank deficient");
  return best;
}

double x_min(std::span<const double> x_hat) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : x_hat) {
    if (v != 0.0) best = std::min(best, std::abs(v));
  }
  if (!std::isfinite(best)) throw ValidationError("x_min of a zero vector");
  return best;
}

RateConstants rate_constants(double sigma_tilde_sq, double xmin, double lambda, double gamma,
                             double spec_norm_sq, double q, Index m, double delta) {
  RateConstants rc;
  rc.sigma_tilde_sq = sigma_tilde_sq;
  rc.x_min = xmin;
  const double c = 2.0 * gamma + spec_norm_sq;
  rc.contraction = 1.0 - sigma_tilde_sq / (2.0 * c * q * static_cast<double>(m)) *
                             (xmin / (xmin + 2.0 * lambda));
  if (delta == 0.0) {
    rc.horizon = 0.0;
  } else {
    rc.horizon = gamma > 0.0 ? delta * delta / (4.0 * gamma) : std::numeric_limits<double>::infinity();
  }
  return rc;
}

RateConstants rate_constants(const Problem& p, const SolverConfig& cfg) {
  if (!p.x_hat) throw ValidationError("rate constants need the ground truth");
  const double beta = p.contamination.beta;
  const double q = uses_quantile(cfg.method) ? cfg.q : 1.0;
  const long long count = std::llround((q - beta) * static_cast<double>(p.rows()));
  if (count < 1) throw ValidationError("(q - beta) m must be at least 1");
  const double s = sigma_tilde_brute(p.A, static_cast<Index>(count));
  return rate_constants(s * s, x_min(*p.x_hat), cfg.lambda, cfg.gamma, p.A.spectral_norm_sq(), q,
                        p.rows(), p.contamination.delta);
}

BoundReport theorem43_bound(const RateConstants& rc, const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw ValidationError("bound check needs at least one trial");
  const Index len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw ValidationError("trial series differ in length");
  }
  BoundReport out;
  if (len < 2) return out;
  const double T = static_cast<double>(series.size());
  for (Index k = 0; k + 1 < len; ++k) {
    num::CompensatedSum s_next, s_cur, s_diff, s_diff2;
    for (const auto& tr : series) {
      const double d = tr[k + 1] - rc.contraction * tr[k];
      s_next.add(tr[k + 1]);
      s_cur.add(tr[k]);
      s_diff.add(d);
      s_diff2.add(d * d);
    }
    const double mean_diff = s_diff.value() / T;
    const double var = series.size() > 1
                           ? std::max(0.0, (s_diff2.value() - T * mean_diff * mean_diff) / (T - 1.0))
                           : 0.0;
    const double se = std::sqrt(var / T);
    const double excess = s_next.value() / T - (rc.contraction * s_cur.value() / T + rc.horizon);
    ++out.steps;
    if (excess > 2.0 * se) ++out.violations;
  }
  out.violation_fraction = static_cast<double>(out.violations) / static_cast<double>(out.steps);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ValidationError("median of an empty list");
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double hi = v[h];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lo + hi);
}

namespace {

std::vector<double> pointwise_median(const std::vector<const std::vector<double>*>& cols, bool& padded) {
  Index len = 0;
  for (const auto* c : cols) len = std::max<Index>(len, c->size());
  std::vector<double> out(len);
  std::vector<double> buf(cols.size());
  for (Index k = 0; k < len; ++k) {
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const auto& c = *cols[t];
      if (k >= c.size()) padded = true;
      buf[t] = k < c.size() ? c[k] : c.back();
    }
    out[k] = median(buf);
  }
  return out;
}

}  // namespace

Summary aggregate_median(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ValidationError("no records to aggregate");
  Summary s;
  s.trials = records.size();
  std::vector<double> it, wall, fin;
  std::vector<const std::vector<double>*> rel, breg, res;
  const bool truth = records.front().has_truth();
  for (const auto& r : records) {
    if (r.has_truth() != truth) throw ValidationError("records mix known and unknown truth");
    if (r.residual_norm.empty()) throw ValidationError("empty run record");
    it.push_back(static_cast<double>(r.stop_index));
    wall.push_back(r.wall_seconds);
    res.push_back(&r.residual_norm);
    if (truth) {
      fin.push_back(r.rel_error.back());
      rel.push_back(&r.rel_error);
      breg.push_back(&r.bregman_error);
    }
  }
  s.median_iterations = median(it);
  s.median_wall_seconds = median(wall);
  s.median_final_rel_error = truth ? median(fin) : std::numeric_limits<double>::quiet_NaN();
  s.residual_norm = pointwise_median(res, s.padded);
  if (truth) {
    s.rel_error = pointwise_median(rel, s.padded);
    s.bregman_error = pointwise_median(breg, s.padded);
  }
  return s;
}

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("KMM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

std::vector<RunRecord> run_trials(Index trials, const std::function<RunRecord(Index)>& fn) {
  std::vector<RunRecord> out(trials);
  std::exception_ptr first;
  std::mutex mu;
  const int workers = static_cast<int>(std::min<Index>(static_cast<Index>(worker_count()), std::max<Index>(trials, 1)));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (Index t = 0; t < trials; ++t) {
    try {
      out[t] = fn(t);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

}  // namespace qrask
