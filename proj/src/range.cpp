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

#include "qrask/range.hpp"

#include <cmath>
#include <sstream>

#include "qrask/error.hpp"

namespace qrask {

namespace {

double to_number(const std::string& s, const std::string& whole) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad number '" + s + "' in range '" + whole + "'");
  }
}

double tidy(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  if (text.empty()) throw ValidationError("empty range");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw ValidationError("range '" + text + "' is not lo:step:hi");
    const double lo = to_number(parts[0], text);
    const double step = to_number(parts[1], text);
    const double hi = to_number(parts[2], text);
    if (!(step > 0.0)) throw ValidationError("range step must be positive");
    if (hi < lo) throw ValidationError("range '" + text + "' is empty");
    const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw ValidationError("range '" + text + "' is too long");
    for (long long i = 0; i < count; ++i) out.push_back(tidy(lo + static_cast<double>(i) * step));
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_number(tok, text));
  return out;
}

}  // namespace qrask
