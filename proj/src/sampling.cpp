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

#include "qrask/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "qrask/error.hpp"

namespace qrask {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ValidationError("uniform_index: empty range");
  u128 prod = static_cast<u128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      prod = static_cast<u128>(engine_()) * n;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * scale;
  return u * scale;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::optional<std::string> QuantileConfig::validate() const {
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("q must lie in (0, 1]");
  if (!(beta >= 0.0 && beta < 0.5)) throw ValidationError("beta must lie in [0, 0.5)");
  if (beta > 0.0 && !(q > beta && q <= 1.0 - beta + 1e-12)) {
    return "q = " + std::to_string(q) + " outside (beta, 1 - beta] for beta = " +
           std::to_string(beta) + "; corrupted rows may be sampled";
  }
  return std::nullopt;
}

namespace {

// nq as an integer when it is one up to rounding in the product.
std::optional<Index> integral(double nq) {
  const double r = std::round(nq);
  if (std::abs(nq - r) <= 1e-9 * std::max(1.0, std::abs(nq))) return static_cast<Index>(r);
  return std::nullopt;
}

}  // namespace

double q_quantile(std::span<const double> z, double q) {
  if (z.empty()) throw ValidationError("q_quantile of an empty sequence");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("q must lie in (0, 1]");
  const Index n = z.size();
  Vector w(z.begin(), z.end());
  const double nq = static_cast<double>(n) * q;
  auto kth = [&](Index k) {  // 0-based order statistic
    std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
    return w[k];
  };
  if (const auto k = integral(nq)) {
    if (*k >= n) return *std::max_element(w.begin(), w.end());
    if (*k == 0) return kth(0);  // nq rounded to zero; only for q < 1/(2n)
    // z_(k) and z_(k+1) in 1-based terms are w[k-1] and w[k].
    const double upper = kth(*k);
    const double lower = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(*k));
    return 0.5 * (lower + upper);
  }
  return kth(static_cast<Index>(std::floor(nq)));
}

Index acceptable_count(Index m, double q) {
  const double qm = static_cast<double>(m) * q;
  if (const auto k = integral(qm)) return std::clamp<Index>(*k, 1, m);
  return std::clamp<Index>(static_cast<Index>(std::ceil(qm)), 1, m);
}

std::span<const Index> AcceptableSetSelector::select(std::span<const double> residuals, double q) {
  const Index m = residuals.size();
  const Index k = acceptable_count(m, q);
  chosen_.clear();
  if (k == m) {
    chosen_.resize(m);
    for (Index i = 0; i < m; ++i) chosen_[i] = i;
    return chosen_;
  }
  order_.resize(m);
  for (Index i = 0; i < m; ++i) order_[i] = i;
  auto less = [&](Index a, Index b) {
    const double ra = std::abs(residuals[a]);
    const double rb = std::abs(residuals[b]);
    return ra != rb ? ra < rb : a < b;
  };
  std::nth_element(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   order_.end(), less);
  const Index pivot = order_[k - 1];
  chosen_.reserve(k);
  for (Index i = 0; i < m; ++i) {
    if (i == pivot || less(i, pivot)) chosen_.push_back(i);
  }
  return chosen_;
}

std::vector<Index> acceptable_set(std::span<const double> residuals, double q) {
  if (residuals.empty()) return {};
  AcceptableSetSelector sel;
  const auto s = sel.select(residuals, q);
  return {s.begin(), s.end()};
}

Index sample_index(std::span<const Index> candidates, RngStream& rng) {
  if (candidates.empty()) throw ValidationError("sample_index: empty candidate set");
  return candidates[rng.uniform_index(candidates.size())];
}

}  // namespace qrask
