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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrask/row_matrix.hpp"
#include "qrask/sampling.hpp"

namespace qrask {

enum class ContaminationMode { exact, noise, corrupt };

const char* to_string(ContaminationMode m) noexcept;
ContaminationMode parse_contamination_mode(const std::string& s);

struct Contamination {
  ContaminationMode mode = ContaminationMode::exact;
  double beta = 0.0;       ///< corrupted fraction
  double delta = 0.0;      ///< ||b~ - b||, always recomputed
  double rel_noise = 0.0;  ///< ||r|| / ||b|| for noise
};

/// A linear system A x = b with unit rows, its contaminated right-hand side
/// b~, and (when known) the sparse ground truth x^.
struct Problem {
  RowMatrix A;
  std::optional<Vector> x_hat;
  Vector b;
  Vector b_tilde;
  Contamination contamination;
  std::uint64_t seed = 0;
  Index sparsity = 0;
  /// Removed empty rows of the source matrix (original indices).
  std::vector<Index> dropped_rows;
  /// Free-form metadata carried through bundles (e.g. tomography geometry).
  std::map<std::string, std::string> extra;

  Index rows() const noexcept { return A.rows(); }
  Index cols() const noexcept { return A.cols(); }
};

/// s-sparse standard-normal truth at uniformly chosen positions.
Vector sparse_truth(Index n, Index s, RngStream& rng);

/// Normalizes `raw`, sets b = A x^ on the normalized rows, mode exact.
Problem make_exact_problem(RowMatrix raw, Vector x_hat, std::uint64_t seed);

/// Standard-normal m x n matrix with an s-sparse truth.
Problem gen_gaussian(Index m, Index n, Index s, std::uint64_t seed);

inline constexpr double kCorruptLo = -100.0;
inline constexpr double kCorruptHi = 100.0;

/// Adds U(lo, hi) to round(beta m) distinct entries of b. Requires an exact
/// problem and 0 < beta <= 0.5.
Problem corrupt(Problem p, double beta, double lo, double hi, std::uint64_t seed);

/// b~ = b + r with Gaussian r rescaled to ||r|| = rel_level ||b||.
Problem add_noise(Problem p, double rel_level, std::uint64_t seed);

/// Reads a Matrix Market file, drops empty rows and builds an exact problem
/// with an s-sparse truth.
Problem from_matrix_market(const std::string& path, Index s, std::uint64_t seed);

/// Writes a bundle directory: matrix.mtx, b.txt, b_tilde.txt, row_norms.txt,
/// x_hat.txt (when known) and meta.txt (key = value lines).
void save_bundle(const Problem& p, const std::string& dir);
/// Throws BundleError on missing files or a delta that disagrees with
/// ||b~ - b|| by more than 1e-9 (relative to max(1, delta)).
Problem load_bundle(const std::string& dir);

void write_vector(const Vector& v, const std::string& path);
Vector read_vector(const std::string& path);

}  // namespace qrask
