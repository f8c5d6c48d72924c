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

#include <functional>
#include <string>
#include <vector>

#include "qrask/problems.hpp"
#include "qrask/run_record.hpp"
#include "qrask/solver.hpp"

namespace qrask {

/// ||x - x^|| / ||x^||. Throws ValidationError for a zero truth.
double relative_error(std::span<const double> x, std::span<const double> x_hat);

inline constexpr double kPsnrCap = 200.0;

/// 10 log10(peak^2 / MSE), capped at kPsnrCap when MSE < peak^2 * 1e-20.
double psnr(std::span<const double> img, std::span<const double> ref, double peak = 1.0);

/// Singular values of a small row-major matrix, descending (one-sided Jacobi).
Vector singular_values(const Vector& row_major, Index rows, Index cols);

inline constexpr Index kBruteMaxRows = 10;
inline constexpr Index kBruteMaxCols = 6;

/// Minimum of sigma_min(A_{I,J}) over |I| = count and nonempty J, counting
/// only submatrices whose smallest singular value exceeds 1e-10 times their
/// largest. Throws SizeGuard beyond kBruteMaxRows x kBruteMaxCols.
double sigma_tilde_brute(const RowMatrix& A, Index count);

/// Smallest nonzero |x^_i|.
double x_min(std::span<const double> x_hat);

struct RateConstants {
  double sigma_tilde_sq = 0.0;
  double x_min = 0.0;
  double contraction = 1.0;
  double horizon = 0.0;
};

/// Contraction 1 - sigma^2 / (2 c q m) * x_min / (x_min + 2 lambda) with
/// c = 2 gamma + L, and horizon delta^2 / (4 gamma) (0 when delta = 0).
RateConstants rate_constants(double sigma_tilde_sq, double x_min, double lambda, double gamma,
                             double spec_norm_sq, double q, Index m, double delta);

/// Brute-forces the constants of a tiny corrupted (or exact) problem; the row
/// count is (q - beta) m rounded to the nearest integer.
RateConstants rate_constants(const Problem& p, const SolverConfig& cfg);

struct BoundReport {
  Index steps = 0;
  Index violations = 0;
  double violation_fraction = 0.0;
};

/// Checks mean D_{k+1} <= contraction * mean D_k + horizon step by step over
/// the trial means of `series` (trials x iterations). A step counts as a
/// violation when the excess is beyond two standard errors of the per-trial
/// difference D_{k+1} - contraction * D_k.
BoundReport theorem43_bound(const RateConstants& rc, const std::vector<std::vector<double>>& series);

/// Median; the mean of the middle pair for even counts. Throws on empty input.
double median(std::vector<double> v);

struct Summary {
  Index trials = 0;
  double median_iterations = 0.0;
  double median_wall_seconds = 0.0;
  double median_final_rel_error = 0.0;  ///< NaN without truth
  /// Per-iteration medians; shorter records are padded with their last value.
  std::vector<double> rel_error;
  std::vector<double> bregman_error;
  std::vector<double> residual_norm;
  bool padded = false;
};

Summary aggregate_median(const std::vector<RunRecord>& records);

/// Worker count for trial pools: available parallelism, capped by the
/// KMM_THREADS environment variable when it holds a positive integer.
int worker_count();

/// Evaluates fn(0), ..., fn(trials - 1) on a worker pool and returns the
/// results in trial order. The first exception thrown is rethrown.
std::vector<RunRecord> run_trials(Index trials, const std::function<RunRecord(Index)>& fn);

}  // namespace qrask
