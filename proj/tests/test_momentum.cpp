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
#include "qrask/momentum.hpp"

using namespace qrask;

namespace {

struct Instance {
  Vector residual;
  Vector v;
  Index i = 0;
  MomentumScalars sc;
};

Instance random_instance(std::mt19937_64& g, Index m = 20) {
  Instance in;
  in.residual = oracle::randn(g, m);
  in.v = oracle::randn(g, m, std::uniform_real_distribution<double>(0.01, 3.0)(g));
  in.i = std::uniform_int_distribution<Index>(0, m - 1)(g);
  const double c = std::uniform_real_distribution<double>(1.0, 20.0)(g);
  in.sc = make_scalars(in.residual, in.v, in.i, c);
  return in;
}

// Quadratic model expanded in the scalars, written out independently of
// surrogate().
double model(const MomentumScalars& s, double a, double w) {
  return -a * s.s1_ik * s.s1_ik + w * s.s4 +
         0.5 * s.c * (a * a * s.s1_ik * s.s1_ik - 2 * a * w * s.s1_ik * s.s3 + w * w * s.s2);
}

}  // namespace

TEST_CASE("zero momentum on the first step") {
  MomentumScalars sc;
  sc.s1_ik = 0.7;
  sc.c = 3.0;
  const StepChoice st = compute_step(sc);
  CHECK(st.alpha == 1.0);
  CHECK(st.w == 0.0);
  CHECK(st.branch == StepBranch::zero_v);
}

TEST_CASE("zero gradient coordinate falls back to the dependent branch") {
  MomentumScalars sc;
  sc.s1_ik = 0.0;
  sc.s2 = 2.0;
  sc.c = 4.0;
  const StepChoice st = compute_step(sc);
  CHECK(st.branch == StepBranch::dependent_nonzero_v);
  CHECK(st.alpha == 1.0);
  CHECK(st.w == 0.0);
}

TEST_CASE("v parallel to e_i uses the dependent branch") {
  Vector r{0.5, -1.0, 2.0};
  Vector v{0.0, 3.0, 0.0};
  const MomentumScalars sc = make_scalars(r, v, 1, 2.0);
  const StepChoice st = compute_step(sc);
  CHECK(st.branch == StepBranch::dependent_nonzero_v);
  CHECK(st.alpha == 1.0);
  // minimiser of model(1, w) in w
  CHECK(st.w == doctest::Approx((sc.c * sc.s1_ik * sc.s3 - sc.s4) / (sc.c * sc.s2)));
}

TEST_CASE("scalars are built from residual and v") {
  const Vector r{1, 2, 3};
  const Vector v{-1, 0, 2};
  const MomentumScalars sc = make_scalars(r, v, 2, 5.0);
  CHECK(sc.s1_ik == 3.0);
  CHECK(sc.s2 == 5.0);
  CHECK(sc.s3 == 2.0);
  CHECK(sc.s4 == 5.0);
  CHECK(sc.c == 5.0);
  CHECK_THROWS_AS(make_scalars(r, v, 3, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(make_scalars(r, Vector{1, 2}, 0, 1.0), DimensionMismatch);
}

TEST_CASE("independent branch solves the normal equations") {
  std::mt19937_64 g(1);
  for (int rep = 0; rep < 1000; ++rep) {
    const Instance in = random_instance(g);
    const StepChoice st = compute_step(in.sc);
    REQUIRE(st.branch == StepBranch::independent);
    const auto& s = in.sc;
    // d/dalpha and d/dw of the model, each scaled by its largest term
    const double e1 = -s.s1_ik * s.s1_ik + s.c * (st.alpha * s.s1_ik * s.s1_ik - st.w * s.s1_ik * s.s3);
    const double e2 = s.s4 + s.c * (st.w * s.s2 - st.alpha * s.s1_ik * s.s3);
    const double n1 = std::max({s.s1_ik * s.s1_ik, std::abs(s.c * st.alpha * s.s1_ik * s.s1_ik),
                                std::abs(s.c * st.w * s.s1_ik * s.s3)});
    const double n2 = std::max({std::abs(s.s4), std::abs(s.c * st.w * s.s2),
                                std::abs(s.c * st.alpha * s.s1_ik * s.s3)});
    CHECK(std::abs(e1) <= 1e-10 * n1);
    CHECK(std::abs(e2) <= 1e-10 * n2);
  }
}

TEST_CASE("surrogate matches the expanded model") {
  std::mt19937_64 g(2);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance in = random_instance(g);
    const double a = std::normal_distribution<double>()(g);
    const double w = std::normal_distribution<double>()(g);
    const double got = surrogate(in.sc, a, w, in.v, in.residual, in.i);
    CHECK(got == doctest::Approx(model(in.sc, a, w)).epsilon(1e-11));
  }
  const Instance in = random_instance(g);
  CHECK(surrogate(in.sc, 0, 0, in.v, in.residual, in.i) == 0.0);
  const double a = 0.3;
  const double s1 = in.sc.s1_ik;
  CHECK(surrogate(in.sc, a, 0, in.v, in.residual, in.i) ==
        doctest::Approx(-a * s1 * s1 + 0.5 * in.sc.c * a * a * s1 * s1));
}

TEST_CASE("computed step beats a dense grid") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 100; ++rep) {
    const Instance in = random_instance(g);
    const StepChoice st = compute_step(in.sc);
    const double best = surrogate(in.sc, st.alpha, st.w, in.v, in.residual, in.i);
    double grid = 1e300;
    for (int a = -100; a <= 100; ++a) {
      for (int b = -100; b <= 100; ++b) {
        const double aa = 2.0 * st.alpha * a / 100.0;
        const double ww = 2.0 * st.w * b / 100.0;
        grid = std::min(grid, model(in.sc, aa, ww));
      }
    }
    CHECK(best <= grid + 1e-9);
  }
}

TEST_CASE("stationarity of the independent branch") {
  // Central differences of the exact quadratic are exact up to roundoff.
  std::mt19937_64 g(4);
  for (int rep = 0; rep < 500; ++rep) {
    const Instance in = random_instance(g);
    const StepChoice st = compute_step(in.sc);
    const double h = 1e-4;
    const double ga = (model(in.sc, st.alpha + h, st.w) - model(in.sc, st.alpha - h, st.w)) / (2 * h);
    const double gw = (model(in.sc, st.alpha, st.w + h) - model(in.sc, st.alpha, st.w - h)) / (2 * h);
    const double scale = 1.0 + std::abs(model(in.sc, st.alpha, st.w)) + in.sc.c * in.sc.s2;
    CHECK(std::abs(ga) <= 1e-9 * scale / h);
    CHECK(std::abs(gw) <= 1e-9 * scale / h);
  }
}

TEST_CASE("momentum never worsens the momentum-free step") {
  std::mt19937_64 g(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const Instance in = random_instance(g);
    const StepChoice st = compute_step(in.sc);
    const double with = surrogate(in.sc, st.alpha, st.w, in.v, in.residual, in.i);
    const double plain = surrogate(in.sc, 1.0 / in.sc.c, 0.0, in.v, in.residual, in.i);
    CHECK(with <= plain + 1e-12 * (1 + std::abs(plain)));
  }
}

TEST_CASE("scaling v rescales w") {
  std::mt19937_64 g(6);
  for (int rep = 0; rep < 300; ++rep) {
    const Instance in = random_instance(g);
    const StepChoice st = compute_step(in.sc);
    for (double t : {-3.0, 0.25, 7.0}) {
      Vector vt = in.v;
      for (double& x : vt) x *= t;
      const StepChoice su = compute_step(make_scalars(in.residual, vt, in.i, in.sc.c));
      CHECK(su.alpha == doctest::Approx(st.alpha).epsilon(1e-12));
      CHECK(su.w == doctest::Approx(st.w / t).epsilon(1e-12));
    }
  }
}

TEST_CASE("large momentum is clamped") {
  MomentumScalars sc;
  sc.s1_ik = 0.0;
  sc.s2 = 1e-8;
  sc.s4 = 1.0;
  sc.c = 1.0;
  const StepChoice st = compute_step(sc);
  CHECK(st.clamped);
  CHECK(st.w == -kMaxMomentum);
}

TEST_CASE("non-finite scalars are rejected") {
  MomentumScalars sc;
  sc.s1_ik = 1.0;
  sc.s2 = 1.0;
  sc.s4 = std::nan("");
  CHECK_THROWS_AS(compute_step(sc), NonFinite);
}
