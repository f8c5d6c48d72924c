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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "qrask/error.hpp"
#include "qrask/row_matrix.hpp"

namespace qrask {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

enum class Field { real, pattern };
enum class Symmetry { general, symmetric, skew };

struct Header {
  bool coordinate = true;
  Field field = Field::real;
  Symmetry symmetry = Symmetry::general;
};

Header parse_header(const std::string& line) {
  std::istringstream in(line);
  std::string banner, object, format, field, symmetry;
  in >> banner >> object >> format >> field >> symmetry;
  if (lower(banner) != "%%matrixmarket") throw ParseError(1, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") throw ParseError(1, "unsupported object '" + object + "'");
  Header h;
  format = lower(format);
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format == "array") {
    h.coordinate = false;
  } else {
    throw ParseError(1, "unknown format '" + format + "'");
  }
  field = lower(field);
  if (field == "real" || field == "double" || field == "integer") {
    h.field = Field::real;
  } else if (field == "pattern") {
    h.field = Field::pattern;
  } else if (field == "complex") {
    throw UnsupportedField("complex Matrix Market files are not supported");
  } else {
    throw ParseError(1, "unknown field '" + field + "'");
  }
  symmetry = lower(symmetry);
  if (symmetry == "general") {
    h.symmetry = Symmetry::general;
  } else if (symmetry == "symmetric") {
    h.symmetry = Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = Symmetry::skew;
  } else if (symmetry == "hermitian") {
    throw UnsupportedField("hermitian Matrix Market files are not supported");
  } else {
    throw ParseError(1, "unknown symmetry '" + symmetry + "'");
  }
  if (h.field == Field::pattern && !h.coordinate) {
    throw ParseError(1, "pattern field requires coordinate format");
  }
  return h;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

RowMatrix assemble(Index rows, Index cols, std::vector<Triplet> t) {
  const double dens = rows && cols ? static_cast<double>(t.size()) /
                                         (static_cast<double>(rows) * static_cast<double>(cols))
                                   : 0.0;
  RowMatrix sparse = RowMatrix::sparse(rows, cols, std::move(t));
  if (dens < kSparseDensityThreshold) return sparse;
  return RowMatrix::dense(rows, cols, sparse.to_dense());
}

}  // namespace

RowMatrix parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++lineno;
  const Header h = parse_header(line);

  // size line
  Index rows = 0, cols = 0, count = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream sz(line);
    long long r = -1, c = -1, z = -1;
    sz >> r >> c;
    if (h.coordinate) sz >> z;
    if (!sz || r < 0 || c < 0 || (h.coordinate && z < 0)) throw ParseError(lineno, "bad size line");
    rows = static_cast<Index>(r);
    cols = static_cast<Index>(c);
    count = h.coordinate ? static_cast<Index>(z) : 0;
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError(lineno, "missing size line");
  if (h.symmetry != Symmetry::general && rows != cols) {
    throw ParseError(lineno, "symmetric storage requires a square matrix");
  }

  std::vector<Triplet> t;
  t.reserve(h.symmetry == Symmetry::general ? count : 2 * count);
  auto push = [&](Index r, Index c, double v) {
    t.push_back({r, c, v});
    if (r != c) {
      if (h.symmetry == Symmetry::symmetric) t.push_back({c, r, v});
      if (h.symmetry == Symmetry::skew) t.push_back({c, r, -v});
    }
  };

  if (h.coordinate) {
    Index seen = 0;
    while (seen < count && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      std::istringstream es(line);
      long long r = 0, c = 0;
      double v = 1.0;
      es >> r >> c;
      if (h.field == Field::real) es >> v;
      if (!es) throw ParseError(lineno, "malformed entry");
      if (r < 1 || c < 1 || static_cast<Index>(r) > rows || static_cast<Index>(c) > cols) {
        throw ParseError(lineno, "index out of range");
      }
      push(static_cast<Index>(r - 1), static_cast<Index>(c - 1), v);
      ++seen;
    }
    if (seen < count) {
      throw ParseError(lineno, "expected " + std::to_string(count) + " entries, found " +
                                   std::to_string(seen));
    }
  } else {
    // Column-major; only the lower triangle is stored for symmetric kinds.
    std::vector<std::pair<Index, Index>> slots;
    for (Index c = 0; c < cols; ++c) {
      Index r0 = 0;
      if (h.symmetry == Symmetry::symmetric) r0 = c;
      if (h.symmetry == Symmetry::skew) r0 = c + 1;
      for (Index r = r0; r < rows; ++r) slots.emplace_back(r, c);
    }
    Index seen = 0;
    while (seen < slots.size() && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      std::istringstream es(line);
      double v = 0.0;
      es >> v;
      if (!es) throw ParseError(lineno, "malformed value");
      if (v != 0.0) push(slots[seen].first, slots[seen].second, v);
      ++seen;
    }
    if (seen < slots.size()) {
      throw ParseError(lineno, "expected " + std::to_string(slots.size()) + " values, found " +
                                   std::to_string(seen));
    }
  }
  return assemble(rows, cols, std::move(t));
}

RowMatrix read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open Matrix Market file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_matrix_market(ss.str());
}

std::string format_matrix_market(const RowMatrix& A) {
  const auto t = A.triplets();
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(A.rows()) + " " + std::to_string(A.cols()) + " " +
         std::to_string(t.size()) + "\n";
  char buf[64];
  for (const auto& e : t) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out += std::to_string(e.row + 1) + " " + std::to_string(e.col + 1) + " " + buf + "\n";
  }
  return out;
}

void write_matrix_market(const RowMatrix& A, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write Matrix Market file '" + path + "'");
  f << format_matrix_market(A);
  if (!f) throw Error("write failed for '" + path + "'");
}

}  // namespace qrask
