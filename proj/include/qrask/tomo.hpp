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

// Parallel-beam tomography test problems on an N x N grid of unit pixels.
//
// The grid covers [-N/2, N/2]^2. Pixel (r, c) has row r counted from the top
// and column c from the left; unknowns are flattened column-major, index
// c * N + r. A ray at angle theta travels along (cos theta, sin theta) at
// signed offset s along the normal (-sin theta, cos theta); the p offsets are
// cell-centred across a detector of width d.

#include <string>
#include <vector>

#include "qrask/problems.hpp"

namespace qrask {

struct TomoSpec {
  Index N = 20;
  std::vector<double> angles_deg;
  Index p = 150;
  double d = 28.0;

  void validate() const;
  /// Offset of ray j in [0, p).
  double offset(Index j) const;
};

/// N x N image, row-major (values[r * N + c]), entries in [0, 1].
struct Phantom {
  Index N = 0;
  Vector values;

  double at(Index r, Index c) const { return values[r * N + c]; }
  /// Column-major copy, the unknown ordering of the projector.
  Vector flatten() const;
  static Phantom from_flat(const Vector& x, Index N);
};

/// Modified Shepp-Logan head phantom sampled at pixel centres.
Phantom shepp_logan(Index N);

struct Projector {
  RowMatrix A;                  ///< un-normalized ray-pixel lengths
  std::vector<Index> dropped;   ///< rays (angle * p + j) that miss the grid
};

/// Exact ray-pixel intersection lengths, one row per ray that meets the grid.
Projector build_projector(const TomoSpec& spec);

/// Projector and phantom as an exact problem with normalized rows.
Problem make_tomo_problem(const TomoSpec& spec, std::uint64_t seed);

/// Plain PGM (P2, maxval 255). `values` is row-major width x height; values
/// are clamped to [lo, hi] and mapped linearly to 0..255.
void write_pgm(const std::string& path, const Vector& values, Index width, Index height,
               double lo = 0.0, double hi = 1.0);

}  // namespace qrask
