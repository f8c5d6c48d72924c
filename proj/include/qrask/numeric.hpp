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

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qrask/error.hpp"

namespace qrask {

using Vector = std::vector<double>;
using Index = std::size_t;

namespace num {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": sizes " + std::to_string(a) + " and " +
                            std::to_string(b) + " differ");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

inline double norm_sq(std::span<const double> a) {
  CompensatedSum s;
  for (double v : a) s.add(v * v);
  return s.value();
}

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline double norm1(std::span<const double> a) {
  CompensatedSum s;
  for (double v : a) s.add(std::abs(v));
  return s.value();
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "distance");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s.add(d * d);
  }
  return std::sqrt(s.value());
}

}  // namespace num
}  // namespace qrask
