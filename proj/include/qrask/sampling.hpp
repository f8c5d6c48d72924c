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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qrask/numeric.hpp"

namespace qrask {

/// Seeded random stream with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std distributions are not, so bounded integers, uniforms and
/// normals are derived here from raw engine output.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-and-reject).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Independent seed for a named sub-purpose (splitmix64 finalizer of seed ^ salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

/// Acceptable ratio q and assumed corruption fraction beta.
struct QuantileConfig {
  double q = 1.0;
  double beta = 0.0;

  /// Throws ValidationError unless 0 < q <= 1 and 0 <= beta < 0.5. Returns a
  /// warning when beta > 0 and q lies outside (beta, 1 - beta].
  std::optional<std::string> validate() const;
};

/// q-quantile over the ascending order statistics z_(1) <= ... <= z_(n):
/// z_([nq]+1) when nq is not an integer, (z_(nq) + z_(nq+1)) / 2 otherwise,
/// and the maximum for q = 1.
double q_quantile(std::span<const double> z, double q);

/// Size of the acceptable set: ceil(q m), with products within 1e-9 of an
/// integer taken as that integer.
Index acceptable_count(Index m, double q);

/// Indices of the acceptable_count(m, q) smallest |residuals|, ordered by
/// (|r_i|, i), returned in ascending index order.
std::vector<Index> acceptable_set(std::span<const double> residuals, double q);

/// Reusable-buffer form of acceptable_set for the per-iteration hot path.
/// Runs in O(m) on average (one nth_element plus one scan).
class AcceptableSetSelector {
 public:
  std::span<const Index> select(std::span<const double> residuals, double q);

 private:
  std::vector<Index> order_;
  std::vector<Index> chosen_;
};

/// Uniform draw from a nonempty candidate list; advances rng.
Index sample_index(std::span<const Index> candidates, RngStream& rng);

}  // namespace qrask
