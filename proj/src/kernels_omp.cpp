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

#include <omp.h>

#include <algorithm>

#include "qrask/kernels.hpp"

namespace qrask::kernels {

bool use_parallel(Exec exec, std::size_t work) {
  switch (exec) {
    case Exec::serial:
      return false;
    case Exec::parallel:
      return true;
    case Exec::automatic:
      break;
  }
  return work >= kParallelMinWork && omp_get_max_threads() > 1 && !omp_in_parallel();
}

namespace omp {

void matvec(DenseView a, std::span<const double> x, std::span<double> out) {
  const auto m = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const double* row = a.values + static_cast<std::size_t>(i) * a.cols;
    const double s = row_dot(row, x.data(), a.cols);
    out[static_cast<std::size_t>(i)] = s;
  }
}

void matvec_t(DenseView a, std::span<const double> y, std::span<double> out) {
  // Column blocks: each block walks the rows in order, like the serial loop.
  constexpr std::size_t kBlock = 256;
  const auto blocks = static_cast<std::ptrdiff_t>((a.cols + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t j0 = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t j1 = std::min(a.cols, j0 + kBlock);
    for (std::size_t j = j0; j < j1; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
      const double* row = a.values + i * a.cols;
      const double yi = y[i];
      axpy(yi, row + j0, out.data() + j0, j1 - j0);
    }
  }
}

void residual(DenseView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out) {
  const auto m = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const double* row = a.values + static_cast<std::size_t>(i) * a.cols;
    const double s = row_dot(row, x.data(), a.cols);
    out[static_cast<std::size_t>(i)] = s - b[static_cast<std::size_t>(i)];
  }
}

void matvec(CsrView a, std::span<const double> x, std::span<double> out) {
  const auto m = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < m; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double s = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    out[i] = s;
  }
}

void matvec_t(CsrView a, std::span<const double> y, std::span<double> out) {
  serial::matvec_t(a, y, out);
}

void residual(CsrView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out) {
  const auto m = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < m; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double s = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    out[i] = s - b[i];
  }
}

}  // namespace omp
}  // namespace qrask::kernels
