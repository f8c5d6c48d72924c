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

#include "qrask/bregman.hpp"

#include <cmath>
#include <string>

#include "qrask/row_matrix.hpp"

namespace qrask {

void shrink_into(std::span<const double> v, RegParam lambda, std::span<double> out) {
  num::require_same_size(v.size(), out.size(), "shrink");
  const double lam = lambda.value();
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = shrink_scalar(v[i], lam);
}

Vector shrink(std::span<const double> v, RegParam lambda) {
  Vector out(v.size());
  shrink_into(v, lambda, out);
  return out;
}

double f_value(std::span<const double> x, RegParam lambda) {
  return lambda.value() * num::norm1(x) + 0.5 * num::norm_sq(x);
}

double f_conj(std::span<const double> x_star, RegParam lambda) {
  num::CompensatedSum s;
  const double lam = lambda.value();
  for (double v : x_star) {
    const double t = shrink_scalar(v, lam);
    s.add(t * t);
  }
  return 0.5 * s.value();
}

double bregman(std::span<const double> x_star, std::span<const double> x,
               std::span<const double> y, RegParam lambda) {
  num::require_same_size(x_star.size(), x.size(), "bregman x*/x");
  num::require_same_size(x_star.size(), y.size(), "bregman x*/y");
  // f*(x*) = 0.5 ||x||^2 because x = shrink(x*).
  const double fc = 0.5 * num::norm_sq(x);
  const double fy = f_value(y, lambda);
  const double value = fc - num::dot(x_star, y) + fy;
  const double tol = 1e-10 * (1.0 + std::abs(fc) + std::abs(fy));
  if (value < -tol) {
    throw ContractViolation("negative Bregman distance " + std::to_string(value) +
                            "; x is not shrink(x*)?");
  }
  return value;
}

double dual_value(std::span<const double> y, const RowMatrix& A, std::span<const double> rhs,
                  RegParam lambda) {
  num::require_same_size(y.size(), A.rows(), "dual_value y");
  num::require_same_size(rhs.size(), A.rows(), "dual_value rhs");
  const Vector x_star = A.matvec_t(y);
  return f_conj(x_star, lambda) - num::dot(y, rhs);
}

Vector dual_gradient(std::span<const double> y, const RowMatrix& A, std::span<const double> rhs,
                     RegParam lambda) {
  num::require_same_size(y.size(), A.rows(), "dual_gradient y");
  num::require_same_size(rhs.size(), A.rows(), "dual_gradient rhs");
  const Vector x = shrink(A.matvec_t(y), lambda);
  Vector g(A.rows());
  A.residual(x, rhs, g);
  return g;
}

}  // namespace qrask
