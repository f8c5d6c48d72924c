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

#include "qrask/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qrask/error.hpp"

namespace qrask {

void TomoSpec::validate() const {
  if (N < 2) throw ValidationError("tomography grid needs N >= 2");
  if (p < 1) throw ValidationError("tomography needs p >= 1 rays per angle");
  if (angles_deg.empty()) throw ValidationError("tomography needs at least one angle");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("detector width must be positive");
}

double TomoSpec::offset(Index j) const {
  return -0.5 * d + (static_cast<double>(j) + 0.5) * d / static_cast<double>(p);
}

Vector Phantom::flatten() const {
  Vector x(N * N);
  for (Index r = 0; r < N; ++r) {
    for (Index c = 0; c < N; ++c) x[c * N + r] = at(r, c);
  }
  return x;
}

Phantom Phantom::from_flat(const Vector& x, Index N) {
  num::require_same_size(x.size(), N * N, "image");
  Phantom ph{N, Vector(N * N)};
  for (Index r = 0; r < N; ++r) {
    for (Index c = 0; c < N; ++c) ph.values[r * N + c] = x[c * N + r];
  }
  return ph;
}

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

constexpr Ellipse kSheppLogan[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},        {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},       {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},     {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.605, 0.0},   {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

// cos and sin of an angle in degrees, exact at multiples of 90.
std::pair<double, double> unit_direction(double deg) {
  const double r = std::fmod(deg, 360.0);
  const double q = r / 90.0;
  if (q == std::round(q)) {
    switch ((static_cast<int>(std::round(q)) % 4 + 4) % 4) {
      case 0:
        return {1.0, 0.0};
      case 1:
        return {0.0, 1.0};
      case 2:
        return {-1.0, 0.0};
      default:
        return {0.0, -1.0};
    }
  }
  const double t = deg * std::numbers::pi / 180.0;
  return {std::cos(t), std::sin(t)};
}

// Parameter interval of the line p0 + t u inside [-h, h] along one axis.
bool clip_axis(double p0, double u, double h, double& lo, double& hi) {
  if (u == 0.0) return p0 >= -h && p0 <= h;
  double t1 = (-h - p0) / u;
  double t2 = (h - p0) / u;
  if (t1 > t2) std::swap(t1, t2);
  lo = std::max(lo, t1);
  hi = std::min(hi, t2);
  return true;
}

constexpr double kMinSegment = 1e-12;

// Entries (column, length) of one ray.
void trace_ray(Index N, double cx, double cy, double s, std::vector<double>& ts,
               std::vector<std::pair<Index, double>>& out) {
  out.clear();
  const double h = 0.5 * static_cast<double>(N);
  const double px = -s * cy;
  const double py = s * cx;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  if (!clip_axis(px, cx, h, lo, hi) || !clip_axis(py, cy, h, lo, hi)) return;
  if (!(hi - lo > kMinSegment)) return;
  ts.clear();
  ts.push_back(lo);
  ts.push_back(hi);
  for (Index g = 0; g <= N; ++g) {
    const double line = -h + static_cast<double>(g);
    if (cx != 0.0) {
      const double t = (line - px) / cx;
      if (t > lo && t < hi) ts.push_back(t);
    }
    if (cy != 0.0) {
      const double t = (line - py) / cy;
      if (t > lo && t < hi) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  const auto clampi = [N](double v) {
    const auto i = static_cast<long long>(std::floor(v));
    return static_cast<Index>(std::clamp<long long>(i, 0, static_cast<long long>(N) - 1));
  };
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double len = ts[k] - ts[k - 1];
    if (len <= kMinSegment) continue;
    const double tm = 0.5 * (ts[k] + ts[k - 1]);
    const Index c = clampi(px + tm * cx + h);
    const Index r = clampi(h - (py + tm * cy));
    out.emplace_back(c * N + r, len);
  }
}

}  // namespace

Phantom shepp_logan(Index N) {
  if (N < 2) throw ValidationError("phantom needs N >= 2");
  Phantom ph{N, Vector(N * N, 0.0)};
  const double dn = static_cast<double>(N);
  for (Index r = 0; r < N; ++r) {
    const double y = 1.0 - (2.0 * static_cast<double>(r) + 1.0) / dn;
    for (Index c = 0; c < N; ++c) {
      const double x = -1.0 + (2.0 * static_cast<double>(c) + 1.0) / dn;
      double v = 0.0;
      for (const Ellipse& e : kSheppLogan) {
        const double t = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double xr = dx * std::cos(t) + dy * std::sin(t);
        const double yr = -dx * std::sin(t) + dy * std::cos(t);
        if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) v += e.intensity;
      }
      ph.values[r * N + c] = std::clamp(v, 0.0, 1.0);
    }
  }
  return ph;
}

Projector build_projector(const TomoSpec& spec) {
  spec.validate();
  const Index na = spec.angles_deg.size();
  const Index N = spec.N;
  std::vector<std::vector<Triplet>> per_angle(na);
  std::vector<std::vector<Index>> empty_per_angle(na);
  std::vector<Index> rows_per_angle(na, 0);
#pragma omp parallel for schedule(static)
  for (Index a = 0; a < na; ++a) {
    const auto [cx, cy] = unit_direction(spec.angles_deg[a]);
    std::vector<double> ts;
    std::vector<std::pair<Index, double>> entries;
    Index local_row = 0;
    for (Index j = 0; j < spec.p; ++j) {
      trace_ray(N, cx, cy, spec.offset(j), ts, entries);
      if (entries.empty()) {
        empty_per_angle[a].push_back(a * spec.p + j);
        continue;
      }
      for (const auto& [col, len] : entries) per_angle[a].push_back({local_row, col, len});
      ++local_row;
    }
    rows_per_angle[a] = local_row;
  }
  Projector out;
  std::vector<Triplet> all;
  Index base = 0;
  for (Index a = 0; a < na; ++a) {
    for (Triplet t : per_angle[a]) {
      t.row += base;
      all.push_back(t);
    }
    base += rows_per_angle[a];
    out.dropped.insert(out.dropped.end(), empty_per_angle[a].begin(), empty_per_angle[a].end());
  }
  out.A = RowMatrix::sparse(base, N * N, std::move(all));
  return out;
}

Problem make_tomo_problem(const TomoSpec& spec, std::uint64_t seed) {
  Projector proj = build_projector(spec);
  if (!proj.dropped.empty()) {
    std::cerr << "info: removed " << proj.dropped.size() << " rays that miss the grid\n";
  }
  Problem p = make_exact_problem(std::move(proj.A), shepp_logan(spec.N).flatten(), seed);
  p.dropped_rows = std::move(proj.dropped);
  std::ostringstream angles;
  for (std::size_t i = 0; i < spec.angles_deg.size(); ++i) {
    angles << (i ? "," : "") << spec.angles_deg[i];
  }
  p.extra["tomo_N"] = std::to_string(spec.N);
  p.extra["tomo_p"] = std::to_string(spec.p);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", spec.d);
  p.extra["tomo_d"] = buf;
  p.extra["tomo_angles"] = angles.str();
  p.extra["flatten"] = "column-major";
  return p;
}

void write_pgm(const std::string& path, const Vector& values, Index width, Index height,
               double lo, double hi) {
  num::require_same_size(values.size(), width * height, "image");
  if (!(hi > lo)) throw ValidationError("image range needs hi > lo");
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << "P2\n" << width << " " << height << "\n255\n";
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const double v = (std::clamp(values[r * width + c], lo, hi) - lo) / (hi - lo);
      f << (c ? " " : "") << static_cast<int>(std::lround(255.0 * v));
    }
    f << "\n";
  }
  if (!f) throw Error("write failed for '" + path + "'");
}

}  // namespace qrask
