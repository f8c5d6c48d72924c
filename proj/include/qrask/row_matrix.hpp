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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrask/kernels.hpp"
#include "qrask/numeric.hpp"

namespace qrask {

/// One stored entry of a sparse matrix (0-based).
struct Triplet {
  Index row;
  Index col;
  double value;
};

struct SpectralEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Real m x n operator stored by rows, densely or as CSR.
///
/// A RowMatrix is immutable once built. Matrices produced by normalize_rows()
/// carry the original row norms and a cached estimate of ||A||_2^2.
class RowMatrix {
 public:
  RowMatrix() = default;

  static RowMatrix dense(Index rows, Index cols, Vector row_major);
  /// Duplicate (row, col) entries are summed; explicit zeros are dropped.
  static RowMatrix sparse(Index rows, Index cols, std::vector<Triplet> entries);
  static RowMatrix identity(Index n);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_sparse() const noexcept { return sparse_; }
  Index nnz() const noexcept;
  double density() const noexcept;

  /// out = A x
  void matvec(std::span<const double> x, std::span<double> out,
              kernels::Exec exec = kernels::Exec::automatic) const;
  Vector matvec(std::span<const double> x) const;
  /// out = A^T y
  void matvec_t(std::span<const double> y, std::span<double> out,
                kernels::Exec exec = kernels::Exec::automatic) const;
  Vector matvec_t(std::span<const double> y) const;
  /// out = A x - b
  void residual(std::span<const double> x, std::span<const double> b, std::span<double> out,
                kernels::Exec exec = kernels::Exec::automatic) const;

  double row_dot(Index i, std::span<const double> x) const;
  /// out += alpha * a_i
  void row_axpy(Index i, double alpha, std::span<double> out) const;
  double row_norm(Index i) const;
  /// Row i as a dense vector of length cols().
  Vector row(Index i) const;

  /// Dense row-major copy.
  Vector to_dense() const;
  std::vector<Triplet> triplets() const;

  /// Original Euclidean row norms recorded by normalize_rows(); empty otherwise.
  std::span<const double> original_row_norms() const noexcept { return row_norms_; }
  bool is_normalized() const noexcept { return !row_norms_.empty(); }
  /// Cached ||A||_2^2; present for normalized matrices.
  const std::optional<SpectralEstimate>& cached_spectral_norm_sq() const noexcept {
    return spec_norm_sq_;
  }
  /// Cached value, or a fresh power-iteration estimate with default settings.
  double spectral_norm_sq() const;

  /// Rebuilds from rows already scaled to unit norm (bundle loading).
  /// Rows must have norm 1 +- 1e-12; `original_norms` is stored as given.
  static RowMatrix from_unit_rows(RowMatrix unit, Vector original_norms);

  kernels::DenseView dense_view() const noexcept { return {values_.data(), rows_, cols_}; }
  kernels::CsrView csr_view() const noexcept { return {row_ptr_, col_idx_, values_, cols_}; }

 private:
  friend std::pair<RowMatrix, Vector> normalize_rows(RowMatrix, std::span<const double>);
  void check_row(Index i) const;

  Index rows_ = 0;
  Index cols_ = 0;
  bool sparse_ = false;
  Vector values_;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  Vector row_norms_;
  std::optional<SpectralEstimate> spec_norm_sq_;
};

/// Scales every row to unit norm and rhs entry i by the same factor, so the
/// solution set of A x = b is unchanged. Throws ZeroRow for an empty row.
/// Caches ||A||_2^2 of the result.
std::pair<RowMatrix, Vector> normalize_rows(RowMatrix raw, std::span<const double> b_raw);

inline constexpr double kSpectralTol = 1e-8;
inline constexpr int kSpectralMaxIter = 5000;

/// Largest eigenvalue of A^T A by power iteration from the normalised
/// all-ones vector. Stops when the Rayleigh quotient changes by at most
/// tol * value; `converged` is false if max_iter was hit first.
SpectralEstimate spectral_norm_sq(const RowMatrix& A, double tol = kSpectralTol,
                                  int max_iter = kSpectralMaxIter);

/// Drops empty rows, returning the kept matrix and the removed row indices.
std::pair<RowMatrix, std::vector<Index>> drop_zero_rows(const RowMatrix& A);

// Matrix Market --------------------------------------------------------------

/// Rows below this density stay sparse after ingestion; denser files become dense.
inline constexpr double kSparseDensityThreshold = 0.05;

/// Reads a real coordinate or array file, general or symmetric. Symmetric
/// input is expanded to full storage. Pattern files load with unit values.
RowMatrix read_matrix_market(const std::string& path);
RowMatrix parse_matrix_market(const std::string& text);
/// Coordinate format, 17 significant digits.
void write_matrix_market(const RowMatrix& A, const std::string& path);
std::string format_matrix_market(const RowMatrix& A);

}  // namespace qrask
