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

#include "qrask/kernels.hpp"

namespace qrask::kernels::serial {

void matvec(DenseView a, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.values + i * a.cols;
    const double s = row_dot(row, x.data(), a.cols);
    out[i] = s;
  }
}

void matvec_t(DenseView a, std::span<const double> y, std::span<double> out) {
  for (std::size_t j = 0; j < a.cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.values + i * a.cols;
    const double yi = y[i];
    axpy(yi, row, out.data(), a.cols);
  }
}

void residual(DenseView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.values + i * a.cols;
    const double s = row_dot(row, x.data(), a.cols);
    out[i] = s - b[i];
  }
}

void matvec(CsrView a, std::span<const double> x, std::span<double> out) {
  const std::size_t m = a.rows();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    out[i] = s;
  }
}

void matvec_t(CsrView a, std::span<const double> y, std::span<double> out) {
  for (std::size_t j = 0; j < a.cols; ++j) out[j] = 0.0;
  const std::size_t m = a.rows();
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = y[i];
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) out[a.col_idx[p]] += a.values[p] * yi;
  }
}

void residual(CsrView a, std::span<const double> x, std::span<const double> b,
              std::span<double> out) {
  const std::size_t m = a.rows();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    out[i] = s - b[i];
  }
}

}  // namespace qrask::kernels::serial
