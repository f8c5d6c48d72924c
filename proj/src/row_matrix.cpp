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

#include "qrask/row_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "qrask/error.hpp"

namespace qrask {

RowMatrix RowMatrix::dense(Index rows, Index cols, Vector row_major) {
  if (row_major.size() != rows * cols) {
    throw DimensionMismatch("dense matrix: expected " + std::to_string(rows * cols) +
                            " values, got " + std::to_string(row_major.size()));
  }
  RowMatrix A;
  A.rows_ = rows;
  A.cols_ = cols;
  A.sparse_ = false;
  A.values_ = std::move(row_major);
  return A;
}

RowMatrix RowMatrix::sparse(Index rows, Index cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw DimensionMismatch("sparse entry (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(rows) +
                              "x" + std::to_string(cols));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  RowMatrix A;
  A.rows_ = rows;
  A.cols_ = cols;
  A.sparse_ = true;
  A.row_ptr_.assign(rows + 1, 0);
  for (std::size_t p = 0; p < entries.size();) {
    const Index r = entries[p].row;
    const Index c = entries[p].col;
    double v = 0.0;
    while (p < entries.size() && entries[p].row == r && entries[p].col == c) v += entries[p++].value;
    if (v != 0.0) {
      A.col_idx_.push_back(c);
      A.values_.push_back(v);
      ++A.row_ptr_[r + 1];
    }
  }
  for (Index i = 0; i < rows; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
  return A;
}

RowMatrix RowMatrix::identity(Index n) {
  Vector v(n * n, 0.0);
  for (Index i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return dense(n, n, std::move(v));
}

Index RowMatrix::nnz() const noexcept {
  if (sparse_) return values_.size();
  return static_cast<Index>(std::count_if(values_.begin(), values_.end(),
                                          [](double v) { return v != 0.0; }));
}

double RowMatrix::density() const noexcept {
  if (rows_ == 0 || cols_ == 0) return 0.0;
  return static_cast<double>(nnz()) / (static_cast<double>(rows_) * static_cast<double>(cols_));
}

void RowMatrix::matvec(std::span<const double> x, std::span<double> out,
                       kernels::Exec exec) const {
  num::require_same_size(x.size(), cols_, "matvec input");
  num::require_same_size(out.size(), rows_, "matvec output");
  const std::size_t work = sparse_ ? values_.size() : rows_ * cols_;
  const bool par = kernels::use_parallel(exec, work);
  if (sparse_) {
    par ? kernels::omp::matvec(csr_view(), x, out) : kernels::serial::matvec(csr_view(), x, out);
  } else {
    par ? kernels::omp::matvec(dense_view(), x, out)
        : kernels::serial::matvec(dense_view(), x, out);
  }
}

Vector RowMatrix::matvec(std::span<const double> x) const {
  Vector out(rows_);
  matvec(x, out);
  return out;
}

void RowMatrix::matvec_t(std::span<const double> y, std::span<double> out,
                         kernels::Exec exec) const {
  num::require_same_size(y.size(), rows_, "matvec_t input");
  num::require_same_size(out.size(), cols_, "matvec_t output");
  const std::size_t work = sparse_ ? values_.size() : rows_ * cols_;
  const bool par = kernels::use_parallel(exec, work);
  if (sparse_) {
    par ? kernels::omp::matvec_t(csr_view(), y, out)
        : kernels::serial::matvec_t(csr_view(), y, out);
  } else {
    par ? kernels::omp::matvec_t(dense_view(), y, out)
        : kernels::serial::matvec_t(dense_view(), y, out);
  }
}

Vector RowMatrix::matvec_t(std::span<const double> y) const {
  Vector out(cols_);
  matvec_t(y, out);
  return out;
}

void RowMatrix::residual(std::span<const double> x, std::span<const double> b,
                         std::span<double> out, kernels::Exec exec) const {
  num::require_same_size(x.size(), cols_, "residual input");
  num::require_same_size(b.size(), rows_, "residual rhs");
  num::require_same_size(out.size(), rows_, "residual output");
  const std::size_t work = sparse_ ? values_.size() : rows_ * cols_;
  const bool par = kernels::use_parallel(exec, work);
  if (sparse_) {
    par ? kernels::omp::residual(csr_view(), x, b, out)
        : kernels::serial::residual(csr_view(), x, b, out);
  } else {
    par ? kernels::omp::residual(dense_view(), x, b, out)
        : kernels::serial::residual(dense_view(), x, b, out);
  }
}

void RowMatrix::check_row(Index i) const {
  if (i >= rows_) throw DimensionMismatch("row index " + std::to_string(i) + " out of range");
}

double RowMatrix::row_dot(Index i, std::span<const double> x) const {
  check_row(i);
  num::require_same_size(x.size(), cols_, "row_dot");
  if (!sparse_) return kernels::row_dot(values_.data() + i * cols_, x.data(), cols_);
  double s = 0.0;
  for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
  return s;
}

void RowMatrix::row_axpy(Index i, double alpha, std::span<double> out) const {
  check_row(i);
  num::require_same_size(out.size(), cols_, "row_axpy");
  if (!sparse_) {
    kernels::axpy(alpha, values_.data() + i * cols_, out.data(), cols_);
    return;
  }
  for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out[col_idx_[p]] += alpha * values_[p];
}

double RowMatrix::row_norm(Index i) const {
  check_row(i);
  if (!sparse_) return num::norm(std::span(values_.data() + i * cols_, cols_));
  return num::norm(std::span(values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]));
}

Vector RowMatrix::row(Index i) const {
  check_row(i);
  Vector r(cols_, 0.0);
  if (!sparse_) {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(i * cols_), cols_, r.begin());
  } else {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) r[col_idx_[p]] = values_[p];
  }
  return r;
}

Vector RowMatrix::to_dense() const {
  if (!sparse_) return values_;
  Vector d(rows_ * cols_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d[i * cols_ + col_idx_[p]] = values_[p];
  }
  return d;
}

std::vector<Triplet> RowMatrix::triplets() const {
  std::vector<Triplet> t;
  if (sparse_) {
    t.reserve(values_.size());
    for (Index i = 0; i < rows_; ++i) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) t.push_back({i, col_idx_[p], values_[p]});
    }
  } else {
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < cols_; ++j) {
        const double v = values_[i * cols_ + j];
        if (v != 0.0) t.push_back({i, j, v});
      }
    }
  }
  return t;
}

double RowMatrix::spectral_norm_sq() const {
  if (spec_norm_sq_) return spec_norm_sq_->value;
  return qrask::spectral_norm_sq(*this).value;
}

RowMatrix RowMatrix::from_unit_rows(RowMatrix unit, Vector original_norms) {
  num::require_same_size(original_norms.size(), unit.rows(), "original row norms");
  for (Index i = 0; i < unit.rows(); ++i) {
    const double nrm = unit.row_norm(i);
    if (std::abs(nrm - 1.0) > 1e-12) {
      throw ContractViolation("row " + std::to_string(i) + " is not unit norm (" +
                              std::to_string(nrm) + ")");
    }
  }
  unit.row_norms_ = std::move(original_norms);
  unit.spec_norm_sq_ = qrask::spectral_norm_sq(unit);
  return unit;
}

std::pair<RowMatrix, Vector> normalize_rows(RowMatrix raw, std::span<const double> b_raw) {
  num::require_same_size(b_raw.size(), raw.rows(), "normalize_rows rhs");
  Vector norms(raw.rows());
  for (Index i = 0; i < raw.rows(); ++i) {
    norms[i] = raw.row_norm(i);
    if (norms[i] == 0.0) throw ZeroRow(i);
  }
  Vector b(b_raw.begin(), b_raw.end());
  for (Index i = 0; i < raw.rows(); ++i) {
    if (raw.sparse_) {
      for (Index p = raw.row_ptr_[i]; p < raw.row_ptr_[i + 1]; ++p) raw.values_[p] /= norms[i];
    } else {
      for (Index j = 0; j < raw.cols_; ++j) raw.values_[i * raw.cols_ + j] /= norms[i];
    }
    b[i] /= norms[i];
  }
  // Rows already of unit norm keep their original scale on repeated calls.
  if (raw.is_normalized()) {
    for (Index i = 0; i < raw.rows(); ++i) norms[i] *= raw.row_norms_[i];
  }
  raw.row_norms_ = std::move(norms);
  raw.spec_norm_sq_ = spectral_norm_sq(raw);
  return {std::move(raw), std::move(b)};
}

SpectralEstimate spectral_norm_sq(const RowMatrix& A, double tol, int max_iter) {
  if (A.rows() == 0 || A.cols() == 0) throw DimensionMismatch("spectral norm of an empty matrix");
  const Index n = A.cols();
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector av(A.rows());
  Vector w(n);
  SpectralEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    A.matvec(v, av);
    A.matvec_t(av, w);
    const double rayleigh = num::dot(v, w);  // v has unit norm
    const double wn = num::norm(w);
    est.value = rayleigh;
    est.iterations = it;
    if (wn == 0.0) {  // A v = 0 for the start vector; A^T A is singular there
      est.converged = true;
      return est;
    }
    for (Index j = 0; j < n; ++j) v[j] = w[j] / wn;
    if (it > 1 && std::abs(rayleigh - prev) <= tol * std::abs(rayleigh)) {
      est.converged = true;
      return est;
    }
    prev = rayleigh;
  }
  return est;
}

std::pair<RowMatrix, std::vector<Index>> drop_zero_rows(const RowMatrix& A) {
  std::vector<Index> dropped;
  std::vector<Index> new_index(A.rows(), 0);
  Index kept = 0;
  for (Index i = 0; i < A.rows(); ++i) {
    if (A.row_norm(i) == 0.0) {
      dropped.push_back(i);
    } else {
      new_index[i] = kept++;
    }
  }
  if (dropped.empty()) return {A, {}};
  if (A.is_sparse()) {
    std::vector<Triplet> t;
    for (const auto& e : A.triplets()) t.push_back({new_index[e.row], e.col, e.value});
    return {RowMatrix::sparse(kept, A.cols(), std::move(t)), std::move(dropped)};
  }
  Vector vals;
  vals.reserve(kept * A.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    if (A.row_norm(i) == 0.0) continue;
    const Vector r = A.row(i);
    vals.insert(vals.end(), r.begin(), r.end());
  }
  return {RowMatrix::dense(kept, A.cols(), std::move(vals)), std::move(dropped)};
}

}  // namespace qrask
