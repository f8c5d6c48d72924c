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

#include "qrask/problems.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "qrask/error.hpp"

namespace qrask {

namespace fs = std::filesystem;

const char* to_string(ContaminationMode m) noexcept {
  switch (m) {
    case ContaminationMode::exact:
      return "exact";
    case ContaminationMode::noise:
      return "noise";
    case ContaminationMode::corrupt:
      return "corrupt";
  }
  return "?";
}

ContaminationMode parse_contamination_mode(const std::string& s) {
  if (s == "exact") return ContaminationMode::exact;
  if (s == "noise") return ContaminationMode::noise;
  if (s == "corrupt") return ContaminationMode::corrupt;
  throw ValidationError("unknown contamination mode '" + s + "'");
}

namespace {

// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<Index> choose_distinct(Index n, Index k, RngStream& rng) {
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const Index j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

double contamination_norm(const Vector& b, const Vector& bt) { return num::distance(bt, b); }

// Salts keep the random streams of the different generators independent.
constexpr std::uint64_t kSaltMatrix = 1;
constexpr std::uint64_t kSaltTruth = 2;
constexpr std::uint64_t kSaltCorrupt = 3;
constexpr std::uint64_t kSaltNoise = 4;

}  // namespace

Vector sparse_truth(Index n, Index s, RngStream& rng) {
  if (s < 1 || s > n) throw ValidationError("sparsity must satisfy 1 <= s <= n");
  Vector x(n, 0.0);
  for (Index j : choose_distinct(n, s, rng)) x[j] = rng.normal();
  return x;
}

Problem make_exact_problem(RowMatrix raw, Vector x_hat, std::uint64_t seed) {
  num::require_same_size(x_hat.size(), raw.cols(), "truth length");
  const Vector b_raw = raw.matvec(x_hat);
  auto [A, b_scaled] = normalize_rows(std::move(raw), b_raw);
  (void)b_scaled;
  Problem p;
  p.A = std::move(A);
  // Recompute on the normalized rows so A x^ = b holds to rounding of one product.
  p.b = p.A.matvec(x_hat);
  p.b_tilde = p.b;
  p.x_hat = std::move(x_hat);
  p.seed = seed;
  p.sparsity = static_cast<Index>(
      std::count_if(p.x_hat->begin(), p.x_hat->end(), [](double v) { return v != 0.0; }));
  return p;
}

Problem gen_gaussian(Index m, Index n, Index s, std::uint64_t seed) {
  if (m == 0 || n == 0) throw ValidationError("matrix dimensions must be positive");
  if (s < 1 || s > n) throw ValidationError("sparsity must satisfy 1 <= s <= n");
  RngStream mat_rng(derive_seed(seed, kSaltMatrix));
  Vector vals(m * n);
  for (double& v : vals) v = mat_rng.normal();
  RngStream truth_rng(derive_seed(seed, kSaltTruth));
  Vector x_hat = sparse_truth(n, s, truth_rng);
  Problem p = make_exact_problem(RowMatrix::dense(m, n, std::move(vals)), std::move(x_hat), seed);
  p.sparsity = s;
  return p;
}

Problem corrupt(Problem p, double beta, double lo, double hi, std::uint64_t seed) {
  if (!(beta > 0.0 && beta <= 0.5)) throw ValidationError("corruption fraction must lie in (0, 0.5]");
  if (p.contamination.mode != ContaminationMode::exact) {
    throw ValidationError("corrupt() expects an exact problem");
  }
  if (lo > hi) throw ValidationError("corruption range lo > hi");
  const Index m = p.rows();
  const auto count = static_cast<Index>(std::llround(beta * static_cast<double>(m)));
  RngStream rng(derive_seed(seed, kSaltCorrupt));
  p.b_tilde = p.b;
  for (Index i : choose_distinct(m, count, rng)) p.b_tilde[i] += rng.uniform(lo, hi);
  p.contamination.mode = ContaminationMode::corrupt;
  p.contamination.beta = beta;
  p.contamination.rel_noise = 0.0;
  p.contamination.delta = contamination_norm(p.b, p.b_tilde);
  return p;
}

Problem add_noise(Problem p, double rel_level, std::uint64_t seed) {
  if (!(rel_level >= 0.0)) throw ValidationError("noise level must be >= 0");
  if (p.contamination.mode != ContaminationMode::exact) {
    throw ValidationError("add_noise() expects an exact problem");
  }
  const Index m = p.rows();
  RngStream rng(derive_seed(seed, kSaltNoise));
  Vector r(m);
  for (double& v : r) v = rng.normal();
  const double scale = rel_level * num::norm(p.b) / num::norm(r);
  p.b_tilde = p.b;
  if (rel_level > 0.0) {
    for (Index i = 0; i < m; ++i) p.b_tilde[i] += scale * r[i];
  }
  p.contamination.mode = ContaminationMode::noise;
  p.contamination.beta = 0.0;
  p.contamination.rel_noise = rel_level;
  p.contamination.delta = contamination_norm(p.b, p.b_tilde);
  return p;
}

Problem from_matrix_market(const std::string& path, Index s, std::uint64_t seed) {
  RowMatrix raw = read_matrix_market(path);
  auto [kept, dropped] = drop_zero_rows(raw);
  if (!dropped.empty()) {
    std::cerr << "warning: dropped " << dropped.size() << " empty rows from " << path << "\n";
  }
  RngStream truth_rng(derive_seed(seed, kSaltTruth));
  Vector x_hat = sparse_truth(kept.cols(), s, truth_rng);
  Problem p = make_exact_problem(std::move(kept), std::move(x_hat), seed);
  p.sparsity = s;
  p.dropped_rows = std::move(dropped);
  p.extra["source"] = fs::path(path).filename().string();
  return p;
}

// Bundles ----------------------------------------------------------------------

void write_vector(const Vector& v, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw BundleError("cannot write '" + path + "'");
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    f << buf;
  }
  if (!f) throw BundleError("write failed for '" + path + "'");
}

Vector read_vector(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw BundleError("missing vector file '" + path + "'");
  Vector v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw BundleError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return v;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::map<std::string, std::string> read_meta(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw BundleError("missing metadata file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw BundleError("malformed metadata line '" + line + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw BundleError("metadata key '" + key + "' missing");
  return it->second;
}

const char* kReservedKeys[] = {"mode", "beta", "delta", "rel_noise", "seed", "s", "storage", "dropped_rows"};

}  // namespace

void save_bundle(const Problem& p, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path d(dir);
  write_matrix_market(p.A, (d / "matrix.mtx").string());
  write_vector(p.b, (d / "b.txt").string());
  write_vector(p.b_tilde, (d / "b_tilde.txt").string());
  write_vector(Vector(p.A.original_row_norms().begin(), p.A.original_row_norms().end()),
               (d / "row_norms.txt").string());
  if (p.x_hat) {
    write_vector(*p.x_hat, (d / "x_hat.txt").string());
  } else {
    fs::remove(d / "x_hat.txt");
  }
  std::ofstream meta(d / "meta.txt");
  if (!meta) throw BundleError("cannot write metadata in '" + dir + "'");
  meta << "mode = " << to_string(p.contamination.mode) << "\n"
       << "beta = " << fmt17(p.contamination.beta) << "\n"
       << "delta = " << fmt17(p.contamination.delta) << "\n"
       << "rel_noise = " << fmt17(p.contamination.rel_noise) << "\n"
       << "seed = " << p.seed << "\n"
       << "s = " << p.sparsity << "\n"
       << "storage = " << (p.A.is_sparse() ? "sparse" : "dense") << "\n";
  std::string dropped;
  for (Index i : p.dropped_rows) dropped += (dropped.empty() ? "" : ",") + std::to_string(i);
  meta << "dropped_rows = " << dropped << "\n";
  for (const auto& [k, v] : p.extra) meta << k << " = " << v << "\n";
  if (!meta) throw BundleError("write failed for metadata in '" + dir + "'");
}

Problem load_bundle(const std::string& dir) {
  const fs::path d(dir);
  if (!fs::is_directory(d)) throw BundleError("bundle directory '" + dir + "' not found");
  const auto kv = read_meta((d / "meta.txt").string());
  Problem p;
  RowMatrix raw;
  try {
    raw = read_matrix_market((d / "matrix.mtx").string());
  } catch (const Error& e) {
    throw BundleError(std::string("bundle matrix: ") + e.what());
  }
  const bool want_sparse = need(kv, "storage") == "sparse";
  if (want_sparse != raw.is_sparse()) {
    raw = want_sparse ? RowMatrix::sparse(raw.rows(), raw.cols(), raw.triplets())
                      : RowMatrix::dense(raw.rows(), raw.cols(), raw.to_dense());
  }
  Vector norms = read_vector((d / "row_norms.txt").string());
  if (norms.size() != raw.rows()) throw BundleError("row_norms.txt length mismatch");
  try {
    p.A = RowMatrix::from_unit_rows(std::move(raw), std::move(norms));
  } catch (const Error& e) {
    throw BundleError(std::string("bundle matrix: ") + e.what());
  }
  p.b = read_vector((d / "b.txt").string());
  p.b_tilde = read_vector((d / "b_tilde.txt").string());
  if (p.b.size() != p.A.rows() || p.b_tilde.size() != p.A.rows()) {
    throw BundleError("right-hand side length does not match the matrix");
  }
  if (fs::exists(d / "x_hat.txt")) {
    p.x_hat = read_vector((d / "x_hat.txt").string());
    if (p.x_hat->size() != p.A.cols()) throw BundleError("x_hat.txt length mismatch");
  }
  try {
    p.contamination.mode = parse_contamination_mode(need(kv, "mode"));
    p.contamination.beta = std::stod(need(kv, "beta"));
    p.contamination.delta = std::stod(need(kv, "delta"));
    p.contamination.rel_noise = std::stod(need(kv, "rel_noise"));
    p.seed = std::stoull(need(kv, "seed"));
    p.sparsity = std::stoull(need(kv, "s"));
  } catch (const BundleError&) {
    throw;
  } catch (const std::exception& e) {
    throw BundleError(std::string("bad metadata value: ") + e.what());
  }
  if (const auto it = kv.find("dropped_rows"); it != kv.end() && !it->second.empty()) {
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.dropped_rows.push_back(std::stoull(tok));
  }
  for (const auto& [k, v] : kv) {
    bool reserved = false;
    for (const char* r : kReservedKeys) reserved = reserved || k == r;
    if (!reserved) p.extra[k] = v;
  }
  const double actual = num::distance(p.b_tilde, p.b);
  if (std::abs(actual - p.contamination.delta) > 1e-9 * std::max(1.0, actual)) {
    throw BundleError("metadata delta " + fmt17(p.contamination.delta) +
                      " disagrees with ||b~ - b|| = " + fmt17(actual));
  }
  p.contamination.delta = actual;
  return p;
}

}  // namespace qrask
