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

// Serial reference kernels against their OpenMP counterparts, plus the
// trial-level parallel loop used by the experiments.

#include <benchmark/benchmark.h>

#include <map>
#include <utility>

#include "qrask/analysis.hpp"
#include "qrask/kernels.hpp"
#include "qrask/problems.hpp"
#include "qrask/row_matrix.hpp"
#include "qrask/solver.hpp"

using namespace qrask;

namespace {

Vector randn(Index n, std::uint64_t seed) {
  RngStream r(seed);
  Vector v(n);
  for (double& x : v) x = r.normal();
  return v;
}

const RowMatrix& dense_matrix(Index m, Index n) {
  static std::map<std::pair<Index, Index>, RowMatrix> cache;
  auto it = cache.find({m, n});
  if (it == cache.end()) it = cache.emplace(std::pair{m, n}, RowMatrix::dense(m, n, randn(m * n, m + n))).first;
  return it->second;
}

const RowMatrix& sparse_matrix(Index m, Index n) {
  static std::map<std::pair<Index, Index>, RowMatrix> cache;
  auto it = cache.find({m, n});
  if (it == cache.end()) {
    RngStream r(m * n);
    std::vector<Triplet> t;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        if (r.uniform01() < 0.02) t.push_back({i, j, r.normal()});
    it = cache.emplace(std::pair{m, n}, RowMatrix::sparse(m, n, std::move(t))).first;
  }
  return it->second;
}

template <kernels::Exec E>
void BM_DenseMatvec(benchmark::State& st) {
  const Index m = st.range(0), n = st.range(1);
  const RowMatrix& A = dense_matrix(m, n);
  const Vector x = randn(n, 1);
  Vector out(m);
  for (auto _ : st) {
    A.matvec(x, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * m * n);
}

template <kernels::Exec E>
void BM_DenseMatvecT(benchmark::State& st) {
  const Index m = st.range(0), n = st.range(1);
  const RowMatrix& A = dense_matrix(m, n);
  const Vector y = randn(m, 2);
  Vector out(n);
  for (auto _ : st) {
    A.matvec_t(y, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * m * n);
}

template <kernels::Exec E>
void BM_DenseResidual(benchmark::State& st) {
  const Index m = st.range(0), n = st.range(1);
  const RowMatrix& A = dense_matrix(m, n);
  const Vector x = randn(n, 3), b = randn(m, 4);
  Vector out(m);
  for (auto _ : st) {
    A.residual(x, b, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * m * n);
}

template <kernels::Exec E>
void BM_SparseResidual(benchmark::State& st) {
  const Index m = st.range(0), n = st.range(1);
  const RowMatrix& A = sparse_matrix(m, n);
  const Vector x = randn(n, 5), b = randn(m, 6);
  Vector out(m);
  for (auto _ : st) {
    A.residual(x, b, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * A.nnz());
}

template <kernels::Exec E>
void BM_SolverStep(benchmark::State& st) {
  const Problem p = gen_gaussian(st.range(0), st.range(1), 10, 7);
  SolverConfig cfg;
  cfg.method = Method::rask_mm;
  cfg.exec = E;
  IterState s = IterState::zero(p.rows(), p.cols(), p.b_tilde);
  RngStream rng(8);
  StepWorkspace ws;
  for (auto _ : st) step(s, p.A, p.b_tilde, cfg, rng, ws);
}

void BM_Trials(benchmark::State& st) {
  const Problem p = gen_gaussian(200, 100, 5, 9);
  for (auto _ : st) {
    auto recs = run_trials(static_cast<Index>(st.range(0)), [&](Index t) {
      SolverConfig c;
      c.max_iter = 500;
      c.err_tol = 0.0;
      c.seed = t;
      return run(p, c);
    });
    benchmark::DoNotOptimize(recs.data());
  }
}

constexpr auto S = kernels::Exec::serial;
constexpr auto P = kernels::Exec::parallel;

#define SIZES Args({500, 1000})->Args({500, 2000})->Args({4000, 1000})

BENCHMARK(BM_DenseMatvec<S>)->SIZES;
BENCHMARK(BM_DenseMatvec<P>)->SIZES;
BENCHMARK(BM_DenseMatvecT<S>)->SIZES;
BENCHMARK(BM_DenseMatvecT<P>)->SIZES;
BENCHMARK(BM_DenseResidual<S>)->SIZES;
BENCHMARK(BM_DenseResidual<P>)->SIZES;
BENCHMARK(BM_SparseResidual<S>)->Args({20000, 5000});
BENCHMARK(BM_SparseResidual<P>)->Args({20000, 5000});
BENCHMARK(BM_SolverStep<S>)->Args({500, 1000});
BENCHMARK(BM_SolverStep<P>)->Args({500, 1000});
BENCHMARK(BM_Trials)->Arg(8)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
