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

// Matrix-vector kernels over raw row storage.
//
// Each kernel exists twice: a plain serial loop in kernels::serial, kept as
// the reference implementation, and an OpenMP version in kernels::omp. The
// OpenMP versions partition the output (rows for A*x, columns for A^T*y) so
// every output entry is accumulated in the same order as the serial loop and
// the two agree bit for bit.

#include <cstddef>
#include <span>

namespace qrask::kernels {

/// Row-major dense block of m rows, n columns.
struct DenseView {
  const double* values;
  std::size_t rows;
  std::size_t cols;
};

/// Compressed sparse rows.
struct CsrView {
  std::span<const std::size_t> row_ptr;
  std::span<const std::size_t> col_idx;
  std::span<const double> values;
  std::size_t cols;
  std::size_t rows() const noexcept { return row_ptr.size() - 1; }
};

/// Inner product used by every dense row kernel. The simd reduction fixes a
/// vectorized summation order at compile time, so serial and OpenMP callers
/// still agree bit for bit.
inline double row_dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
  return s;
}

/// y += alpha * a
inline void axpy(double alpha, const double* a, double* y, std::size_t n) noexcept {
#pragma omp simd
  for (std::size_t j = 0; j < n; ++j) y[j] += alpha * a[j];
}

namespace serial {
void matvec(DenseView a, std::span<const double> x, std::span<double> out);
void matvec_t(DenseView a, std::span<const double> y, std::span<double> out);
/// out = A*x - b
void residual(DenseView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out);

void matvec(CsrView a, std::span<const double> x, std::span<double> out);
void matvec_t(CsrView a, std::span<const double> y, std::span<double> out);
void residual(CsrView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out);
}  // namespace serial

namespace omp {
void matvec(DenseView a, std::span<const double> x, std::span<double> out);
void matvec_t(DenseView a, std::span<const double> y, std::span<double> out);
void residual(DenseView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out);

void matvec(CsrView a, std::span<const double> x, std::span<double> out);
// Sparse transpose products scatter into shared columns; there is no
// partition of the output that preserves the serial order without a CSC copy,
// so this forwards to the serial kernel.
void matvec_t(CsrView a, std::span<const double> y, std::span<double> out);
void residual(CsrView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out);
}  // namespace omp

/// Work-size cutoff (multiply-adds) below which the OpenMP kernels are not used.
inline constexpr std::size_t kParallelMinWork = std::size_t{1} << 16;

enum class Exec { serial, parallel, automatic };

/// True when an automatic dispatch of `work` multiply-adds should go parallel:
/// enough work, more than one thread, and not already inside a parallel region.
bool use_parallel(Exec exec, std::size_t work);

}  // namespace qrask::kernels
