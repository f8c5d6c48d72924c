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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "qrask/analysis.hpp"

using namespace qrask;

namespace {

// Full enumeration with Gram-matrix eigenvalues as the SVD.
double sigma_tilde_oracle(const oracle::Mat& a, std::size_t count) {
  const std::size_t m = a.size(), n = a[0].size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned rm = 1; rm < (1u << m); ++rm) {
    if (static_cast<std::size_t>(__builtin_popcount(rm)) != count) continue;
    for (unsigned cm = 1; cm < (1u << n); ++cm) {
      oracle::Mat sub;
      for (std::size_t i = 0; i < m; ++i) {
        if (!(rm >> i & 1u)) continue;
        std::vector<double> row;
        for (std::size_t j = 0; j < n; ++j)
          if (cm >> j & 1u) row.push_back(a[i][j]);
        sub.push_back(row);
      }
      const auto sv = oracle::singular_values(sub);
      if (sv.front() > 0 && sv.back() > 1e-10 * sv.front()) best = std::min(best, sv.back());
    }
  }
  return best;
}

RunRecord synthetic_record(std::vector<double> err, double wall) {
  RunRecord r;
  r.rel_error = err;
  r.bregman_error = err;
  r.residual_norm = err;
  r.stop_index = err.size() - 1;
  r.wall_seconds = wall;
  return r;
}

}  // namespace

TEST_CASE("relative error") {
  const Vector xh{1, -2, 2};
  CHECK(relative_error(xh, xh) == 0.0);
  CHECK(relative_error(Vector(3, 0.0), xh) == 1.0);
  CHECK(relative_error(Vector{2, -4, 4}, xh) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_error(Vector{1}, Vector{0}), ValidationError);
}

TEST_CASE("PSNR") {
  const Vector a{0.2, 0.4, 0.6, 0.8};
  CHECK(psnr(a, a) == kPsnrCap);
  CHECK(psnr(Vector{1, 1}, Vector{0, 0}) == doctest::Approx(0.0));
  CHECK(psnr(Vector{0.1, 0.1}, Vector{0, 0}) == doctest::Approx(20.0));
  CHECK_THROWS_AS(psnr(Vector{1}, Vector{1, 2}), DimensionMismatch);
}

TEST_CASE("PSNR drops when noise is added") {
  std::mt19937_64 g(1);
  int ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Vector ref = oracle::randn(g, 50);
    Vector n1 = ref, n2;
    const Vector e1 = oracle::randn(g, 50, 0.01);
    for (Index i = 0; i < 50; ++i) n1[i] += e1[i];
    n2 = n1;
    const Vector e2 = oracle::randn(g, 50, 0.01);
    for (Index i = 0; i < 50; ++i) n2[i] += e2[i];
    ok += psnr(n2, ref) < psnr(n1, ref);
  }
  CHECK(ok >= 99);
}

TEST_CASE("singular values by one-sided Jacobi") {
  std::mt19937_64 g(2);
  for (int rep = 0; rep < 100; ++rep) {
    const Index r = 1 + rep % 7, c = 1 + (rep / 7) % 6;
    const Vector d = oracle::randn(g, r * c);
    oracle::Mat M = oracle::zeros(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) M[i][j] = d[i * c + j];
    const Vector got = singular_values(d, r, c);
    const auto want = oracle::singular_values(M);
    REQUIRE(got.size() == std::min(r, c));
    for (Index k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-10 * want.front());
  }
}

TEST_CASE("brute-force sigma tilde on the identity") {
  CHECK(sigma_tilde_brute(RowMatrix::identity(2), 2) == doctest::Approx(1.0));
  CHECK(sigma_tilde_brute(RowMatrix::identity(2), 1) == doctest::Approx(1.0));
}

TEST_CASE("brute-force sigma tilde matches the enumeration oracle") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto [A, b] = normalize_rows(RowMatrix::dense(5, 3, oracle::randn(g, 15)), Vector(5, 0.0));
    oracle::Mat M = oracle::zeros(5, 3);
    const Vector d = A.to_dense();
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 3; ++j) M[i][j] = d[i * 3 + j];
    for (Index count : {1, 2, 3, 5}) {
      const double got = sigma_tilde_brute(A, count);
      CHECK(got == doctest::Approx(sigma_tilde_oracle(M, count)).epsilon(1e-9));
      // minimum over subsets: no larger than the full-column submatrix of the first rows
      oracle::Mat first(M.begin(), M.begin() + count);
      const auto sv = oracle::singular_values(first);
      if (sv.back() > 1e-10 * sv.front()) CHECK(got <= sv.back() + 1e-12);
    }
  }
}

TEST_CASE("brute-force sigma tilde guards its size") {
  CHECK_THROWS_AS(sigma_tilde_brute(RowMatrix::identity(11), 3), SizeGuard);
  CHECK_THROWS_AS(sigma_tilde_brute(RowMatrix::dense(3, 7, Vector(21, 1.0)), 2), SizeGuard);
  CHECK_THROWS_AS(sigma_tilde_brute(RowMatrix::identity(3), 0), ValidationError);
}

TEST_CASE("x_min") {
  CHECK(x_min(Vector{0, -0.5, 2, 0}) == 0.5);
  CHECK_THROWS_AS(x_min(Vector{0, 0}), ValidationError);
}

TEST_CASE("rate constants") {
  const RateConstants rc = rate_constants(0.5, 1.0, 1.0, 0.1, 2.0, 0.5, 8, 3.0);
  CHECK(rc.contraction == doctest::Approx(1.0 - 0.5 / (2 * 2.2 * 0.5 * 8) * (1.0 / 3.0)));
  CHECK(rc.horizon == doctest::Approx(9.0 / 0.4));
  CHECK(rc.contraction > 0.0);
  CHECK(rc.contraction <= 1.0);
  CHECK(rate_constants(0.5, 1, 1, 0, 2, 1, 8, 0).horizon == 0.0);
  CHECK(std::isinf(rate_constants(0.5, 1, 1, 0, 2, 1, 8, 1).horizon));
  double prev_c = 0.0, prev_h = std::numeric_limits<double>::infinity();
  for (double gamma : {0.01, 0.1, 1.0, 10.0}) {
    const RateConstants r = rate_constants(0.5, 1.0, 1.0, gamma, 2.0, 0.5, 8, 3.0);
    CHECK(r.contraction > prev_c);
    CHECK(r.horizon < prev_h);
    prev_c = r.contraction;
    prev_h = r.horizon;
  }
}

TEST_CASE("bound check counts violations") {
  RateConstants rc;
  rc.contraction = 0.5;
  rc.horizon = 0.0;
  // exact geometric decay sits on the bound: never a violation
  std::vector<std::vector<double>> ok(3, std::vector<double>{8, 4, 2, 1});
  CHECK(theorem43_bound(rc, ok).violations == 0);
  // flat series violates at every step
  std::vector<std::vector<double>> bad(3, std::vector<double>{8, 8, 8, 8});
  const BoundReport r = theorem43_bound(rc, bad);
  CHECK(r.steps == 3);
  CHECK(r.violations == 3);
  CHECK(r.violation_fraction == 1.0);
  // a wide band absorbs a small mean excess
  std::vector<std::vector<double>> noisy{{1, 0.9}, {1, 0.1}};
  CHECK(theorem43_bound(rc, noisy).violations == 0);
  rc.horizon = 100.0;
  CHECK(theorem43_bound(rc, bad).violations == 0);
  CHECK_THROWS_AS(theorem43_bound(rc, {{1, 2}, {1}}), ValidationError);
}

TEST_CASE("median") {
  CHECK(median({3}) == 3.0);
  CHECK(median({4, 1}) == 2.5);
  CHECK(median({5, 1, 3}) == 3.0);
  std::mt19937_64 g(4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v = oracle::randn(g, 1 + rep % 50);
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const double want = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    CHECK(median(v) == want);
  }
  CHECK_THROWS_AS(median({}), ValidationError);
}

TEST_CASE("median aggregation of run records") {
  const Summary one = aggregate_median({synthetic_record({3, 2, 1}, 0.5)});
  CHECK(one.trials == 1);
  CHECK(one.rel_error == std::vector<double>{3, 2, 1});
  CHECK(one.median_iterations == 2.0);
  CHECK(one.median_wall_seconds == 0.5);
  CHECK(one.median_final_rel_error == 1.0);
  CHECK_FALSE(one.padded);

  const Summary two = aggregate_median({synthetic_record({4, 2}, 1.0), synthetic_record({2, 1, 0.5}, 3.0)});
  CHECK(two.padded);
  CHECK(two.rel_error == std::vector<double>{3, 1.5, 1.25});
  CHECK(two.median_iterations == 1.5);
  CHECK(two.median_wall_seconds == 2.0);

  std::mt19937_64 g(5);
  std::vector<RunRecord> recs;
  std::vector<std::vector<double>> cols(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> e = oracle::randn(g, 4);
    for (int k = 0; k < 4; ++k) cols[k].push_back(e[k]);
    recs.push_back(synthetic_record(e, 1.0));
  }
  const Summary fifty = aggregate_median(recs);
  for (int k = 0; k < 4; ++k) {
    std::sort(cols[k].begin(), cols[k].end());
    CHECK(fifty.rel_error[k] == 0.5 * (cols[k][24] + cols[k][25]));
  }
  CHECK_THROWS_AS(aggregate_median({}), ValidationError);
}

TEST_CASE("trials run in parallel in index order") {
  const auto recs = run_trials(17, [](Index t) { return synthetic_record({double(t)}, 0.0); });
  REQUIRE(recs.size() == 17);
  for (Index t = 0; t < 17; ++t) CHECK(recs[t].rel_error[0] == double(t));
  CHECK(worker_count() >= 1);
  CHECK_THROWS_AS(run_trials(4,
                             [](Index t) -> RunRecord {
                               if (t == 2) throw ValidationError("boom");
                               return {};
                             }),
                  ValidationError);
}
