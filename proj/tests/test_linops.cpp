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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qrask/row_matrix.hpp"

using namespace qrask;

namespace {

oracle::Mat densify(const RowMatrix& A) {
  oracle::Mat d = oracle::zeros(A.rows(), A.cols());
  for (const Triplet& t : A.triplets()) d[t.row][t.col] += t.value;
  return d;
}

RowMatrix random_dense(std::mt19937_64& g, Index m, Index n) {
  return RowMatrix::dense(m, n, oracle::randn(g, m * n));
}

RowMatrix random_sparse(std::mt19937_64& g, Index m, Index n, double keep) {
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z;
  std::vector<Triplet> t;
  for (Index i = 0; i < m; ++i) {
    t.push_back({i, static_cast<Index>(u(g) * n) % n, 1.0 + u(g)});
    for (Index j = 0; j < n; ++j)
      if (u(g) < keep) t.push_back({i, j, z(g)});
  }
  return RowMatrix::sparse(m, n, std::move(t));
}

double max_abs_diff(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("normalize_rows scales rows and rhs together") {
  const RowMatrix raw = RowMatrix::dense(2, 2, {3, 4, 0, 1});
  auto [A, b] = normalize_rows(raw, Vector{5, 2});
  CHECK(A.to_dense() == Vector{0.6, 0.8, 0.0, 1.0});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == 2.0);
  CHECK(A.original_row_norms()[0] == 5.0);

  auto [I, bi] = normalize_rows(RowMatrix::identity(4), Vector{1, -2, 3, 0.5});
  CHECK(I.to_dense() == RowMatrix::identity(4).to_dense());
  CHECK(bi == Vector{1, -2, 3, 0.5});
}

TEST_CASE("normalize_rows rejects zero rows and bad rhs length") {
  const RowMatrix raw = RowMatrix::dense(2, 2, {1, 0, 0, 0});
  CHECK_THROWS_AS(normalize_rows(raw, Vector{1, 1}), ZeroRow);
  CHECK_THROWS_AS(normalize_rows(RowMatrix::identity(2), Vector{1}), DimensionMismatch);
}

TEST_CASE("normalized rows have unit norm and normalization is idempotent") {
  std::mt19937_64 g(1);
  for (int rep = 0; rep < 20; ++rep) {
    const bool sparse = rep % 2 == 1;
    const RowMatrix raw = sparse ? random_sparse(g, 40, 30, 0.1) : random_dense(g, 40, 30);
    const Vector b = oracle::randn(g, 40);
    auto [A, bn] = normalize_rows(raw, b);
    for (Index i = 0; i < A.rows(); ++i) {
      CHECK(std::abs(A.row_norm(i) - 1.0) <= 1e-12);
      CHECK(bn[i] == doctest::Approx(b[i] / raw.row_norm(i)).epsilon(1e-15));
    }
    auto [A2, b2] = normalize_rows(A, bn);
    CHECK(max_abs_diff(A2.to_dense(), A.to_dense()) <= 1e-15);
    CHECK(max_abs_diff(b2, bn) <= 1e-15);
    const double L = A.spectral_norm_sq();
    CHECK(L >= 1.0 - 1e-12);
    CHECK(L <= 40.0 + 1e-12);
  }
}

TEST_CASE("matrix products on small examples") {
  const RowMatrix I = RowMatrix::identity(3);
  CHECK(I.matvec(Vector{1, 2, 3}) == Vector{1, 2, 3});
  std::mt19937_64 g(2);
  const RowMatrix A = random_dense(g, 5, 4);
  for (Index i = 0; i < 5; ++i) {
    Vector e(5, 0.0);
    e[i] = 1.0;
    CHECK(A.matvec_t(e) == A.row(i));
  }
  CHECK_THROWS_AS(A.matvec(Vector(5, 0.0)), DimensionMismatch);
  CHECK_THROWS_AS(A.matvec_t(Vector(4, 0.0)), DimensionMismatch);
}

TEST_CASE("sparse products agree with the densified oracle") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    const RowMatrix A = random_sparse(g, 60, 45, 0.05);
    CHECK(A.is_sparse());
    const oracle::Mat D = densify(A);
    const Vector x = oracle::randn(g, 45);
    const Vector y = oracle::randn(g, 60);
    CHECK(max_abs_diff(A.matvec(x), oracle::matvec(D, x)) <= 1e-13);
    CHECK(max_abs_diff(A.matvec_t(y), oracle::matvec_t(D, y)) <= 1e-13);
    Vector r(60);
    A.residual(x, y, r);
    Vector want = oracle::matvec(D, x);
    for (Index i = 0; i < 60; ++i) want[i] -= y[i];
    CHECK(max_abs_diff(r, want) <= 1e-13);
  }
}

TEST_CASE("adjoint identity") {
  std::mt19937_64 g(4);
  for (int rep = 0; rep < 50; ++rep) {
    const RowMatrix A = rep % 2 ? random_sparse(g, 33, 21, 0.2) : random_dense(g, 33, 21);
    const Vector x = oracle::randn(g, 21);
    const Vector y = oracle::randn(g, 33);
    const double lhs = num::dot(A.matvec(x), y);
    const double rhs = num::dot(x, A.matvec_t(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  std::mt19937_64 g(5);
  for (bool sparse : {false, true}) {
    const RowMatrix A = sparse ? random_sparse(g, 700, 400, 0.05) : random_dense(g, 700, 400);
    const Vector x = oracle::randn(g, 400);
    const Vector y = oracle::randn(g, 700);
    Vector s1(700), p1(700), s2(400), p2(400), s3(700), p3(700);
    A.matvec(x, s1, kernels::Exec::serial);
    A.matvec(x, p1, kernels::Exec::parallel);
    A.matvec_t(y, s2, kernels::Exec::serial);
    A.matvec_t(y, p2, kernels::Exec::parallel);
    A.residual(x, y, s3, kernels::Exec::serial);
    A.residual(x, y, p3, kernels::Exec::parallel);
    CHECK(s1 == p1);
    CHECK(s3 == p3);
    // The parallel transpose reduces per block, so allow roundoff only.
    CHECK(max_abs_diff(s2, p2) <= 1e-12);
  }
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm_sq(RowMatrix::identity(7)).value == doctest::Approx(1.0).epsilon(1e-14));
  const RowMatrix D = RowMatrix::dense(2, 2, {3, 0, 0, 1});
  CHECK(spectral_norm_sq(D).value == doctest::Approx(9.0).epsilon(1e-8));
  std::mt19937_64 g(6);
  for (int rep = 0; rep < 20; ++rep) {
    const RowMatrix A = random_dense(g, 10, 6);
    const double want = oracle::sym_eigenvalues(oracle::gram(densify(A))).back();
    const SpectralEstimate est = spectral_norm_sq(A, 1e-14, 100000);
    CHECK(est.converged);
    CHECK(std::abs(est.value - want) <= 1e-8 * want);
  }
  CHECK_THROWS_AS(spectral_norm_sq(RowMatrix::dense(0, 3, {})), DimensionMismatch);
}

TEST_CASE("spectral norm reports non-convergence with its best estimate") {
  std::mt19937_64 g(7);
  const RowMatrix A = random_dense(g, 10, 6);
  const SpectralEstimate est = spectral_norm_sq(A, 0.0, 3);
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 3);
  const double want = oracle::sym_eigenvalues(oracle::gram(densify(A))).back();
  CHECK(est.value <= want * (1 + 1e-12));
  CHECK(est.value > 0.0);
}

TEST_CASE("Matrix Market coordinate general") {
  const RowMatrix A = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 4\n");
  CHECK(A.rows() == 2);
  CHECK(A.cols() == 3);
  CHECK(A.nnz() == 3);
  CHECK(A.to_dense() == Vector{1.5, 4, 0, 0, 0, -2});
}

TEST_CASE("Matrix Market symmetric expansion") {
  const RowMatrix A =
      parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 3\n2 1 7\n");
  CHECK(A.to_dense() == Vector{3, 7, 7, 0});
  const RowMatrix S =
      parse_matrix_market("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 5\n");
  CHECK(S.to_dense() == Vector{0, -5, 5, 0});
}

TEST_CASE("Matrix Market array format is column-major") {
  const RowMatrix A = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK(A.to_dense() == Vector{1, 3, 2, 4});
  const RowMatrix S = parse_matrix_market("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n4\n");
  CHECK(S.to_dense() == Vector{1, 2, 2, 4});
}

TEST_CASE("Matrix Market pattern entries load as ones") {
  const RowMatrix A =
      parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
  CHECK(A.to_dense() == Vector{0, 1, 1, 0});
}

TEST_CASE("Matrix Market errors") {
  CHECK_THROWS_AS(parse_matrix_market(""), ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                  UnsupportedField);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n"),
                  UnsupportedField);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_matrix_market("matrix coordinate real general\n1 1 1\n1 1 1\n"), ParseError);
  try {
    parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n9 9 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("Matrix Market round trip keeps every digit") {
  std::mt19937_64 g(8);
  for (bool sparse : {false, true}) {
    const RowMatrix A = sparse ? random_sparse(g, 25, 19, 0.1) : random_dense(g, 9, 7);
    const RowMatrix B = parse_matrix_market(format_matrix_market(A));
    CHECK(B.rows() == A.rows());
    CHECK(B.cols() == A.cols());
    CHECK(B.to_dense() == A.to_dense());
  }
}

TEST_CASE("drop_zero_rows reports original indices") {
  const RowMatrix A = RowMatrix::sparse(4, 2, {{1, 0, 2.0}, {3, 1, -1.0}});
  auto [B, dropped] = drop_zero_rows(A);
  CHECK(B.rows() == 2);
  CHECK(dropped == std::vector<Index>{0, 2});
  CHECK(B.to_dense() == Vector{2, 0, 0, -1});
}
