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

// Convex calculus for f(x) = lambda * ||x||_1 + 0.5 * ||x||^2.
//
// Subgradients are never materialised as sets. A point x* in df(x) is carried
// as the pair (x*, x) with x = shrink(x*, lambda); every routine that takes
// such a pair relies on that relation holding.

#include <cmath>
#include <span>

#include "qrask/error.hpp"
#include "qrask/numeric.hpp"

namespace qrask {

class RowMatrix;

/// Sparsity weight of the regularizer; lambda == 0 is the plain least-norm case.
class RegParam {
 public:
  explicit RegParam(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ValidationError("lambda must be finite and nonnegative");
    }
  }
  double value() const noexcept { return lambda_; }

 private:
  double lambda_;
};

inline double shrink_scalar(double v, double lambda) noexcept {
  const double mag = std::abs(v) - lambda;
  if (mag <= 0.0) return 0.0;
  return v > 0.0 ? mag : -mag;
}

/// Element-wise soft threshold max(|v| - lambda, 0) * sign(v).
Vector shrink(std::span<const double> v, RegParam lambda);
void shrink_into(std::span<const double> v, RegParam lambda, std::span<double> out);

/// lambda * ||x||_1 + 0.5 * ||x||^2
double f_value(std::span<const double> x, RegParam lambda);

/// Convex conjugate f*(x*) = 0.5 * ||shrink(x*, lambda)||^2.
double f_conj(std::span<const double> x_star, RegParam lambda);

/// Bregman distance D_f^{x*}(x, y) = f*(x*) - <x*, y> + f(y), x = shrink(x*).
/// Throws ContractViolation if the value is negative beyond rounding,
/// i.e. below -1e-10 * (1 + |f*| + |f|).
double bregman(std::span<const double> x_star, std::span<const double> x,
               std::span<const double> y, RegParam lambda);

/// Dual objective f*(A^T y) - <y, rhs>. With rhs = b this is the exact dual,
/// with rhs = b~ the perturbed one.
double dual_value(std::span<const double> y, const RowMatrix& A, std::span<const double> rhs,
                  RegParam lambda);

/// Gradient of dual_value: A * shrink(A^T y) - rhs.
Vector dual_gradient(std::span<const double> y, const RowMatrix& A, std::span<const double> rhs,
                     RegParam lambda);

}  // namespace qrask
