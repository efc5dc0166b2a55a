// Copyright 2026 The uavnet Authors.
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

#include "uavnet/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <utility>
#include <sstream>
#include <stdexcept>

namespace uavnet::heatmap {

Heatmap generate(std::span<const radio::Point2D> users, double area_side_m,
                 int n, double coh_r_m) {
  if (n < 2) throw std::invalid_argument("heatmap n must be >= 2");
  if (coh_r_m < 0.0) throw std::invalid_argument("coh_r_m must be >= 0");
  if (!(area_side_m > 0.0))
    throw std::invalid_argument("area_side_m must be > 0");
  for (const auto& u : users) {
    if (u.x_m < 0.0 || u.x_m > area_side_m || u.y_m < 0.0 ||
        u.y_m > area_side_m) {
      throw std::invalid_argument("user outside target area");
    }
  }

  Heatmap map;
  map.n = n;
  map.pitch_m = area_side_m / (n - 1);
  map.params.coh_r_m = coh_r_m;
  map.values.assign(static_cast<size_t>(n) * n, 0.0);

  const double r2 = coh_r_m * coh_r_m;
  for (const auto& u : users) {
    // only pixels inside the user's disc bounding box can count it
    const int j_lo = std::max(0, static_cast<int>(std::ceil((u.x_m - coh_r_m) / map.pitch_m)));
    const int j_hi = std::min(n - 1, static_cast<int>(std::floor((u.x_m + coh_r_m) / map.pitch_m)));
    const int i_lo = std::max(0, static_cast<int>(std::ceil((u.y_m - coh_r_m) / map.pitch_m)));
    const int i_hi = std::min(n - 1, static_cast<int>(std::floor((u.y_m + coh_r_m) / map.pitch_m)));
    for (int i = i_lo; i <= i_hi; ++i) {
      const double dy = i * map.pitch_m - u.y_m;
      for (int j = j_lo; j <= j_hi; ++j) {
        const double dx = j * map.pitch_m - u.x_m;
        if (dx * dx + dy * dy <= r2) map.at(i, j) += 1.0;
      }
    }
  }
  return map;
}

Heatmap smooth(const Heatmap& map, int broad_r_px, int iterations) {
  if (broad_r_px < 0) throw std::invalid_argument("broad_r_px must be >= 0");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");

  Heatmap out = map;
  out.params.broad_r_px = broad_r_px;
  out.params.iterations = iterations;
  const int n = map.n;
  std::vector<double> next(out.values.size());
  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      const int lt = std::max(i - broad_r_px, 0);
      const int rt = std::min(i + broad_r_px, n - 1);
      for (int j = 0; j < n; ++j) {
        const int dn = std::max(j - broad_r_px, 0);
        const int up = std::min(j + broad_r_px, n - 1);
        double acc = 0.0;
        for (int a = lt; a <= rt; ++a)
          for (int b = dn; b <= up; ++b) acc += out.at(a, b);
        next[static_cast<size_t>(i) * n + j] =
            acc / ((rt - lt + 1) * (up - dn + 1));
      }
    }
    out.values.swap(next);
  }
  return out;
}

CoarseMap downsample(const Heatmap& map, int m) {
  if (m < 2 || m > map.n)
    throw std::invalid_argument("downsample target must satisfy 2 <= m <= n");

  CoarseMap out;
  out.m = m;
  out.values.assign(static_cast<size_t>(m) * m, 0.0);
  const int base = map.n / m;
  auto block = [&](int b) {
    const int lo = b * base;
    const int hi = (b == m - 1) ? map.n : (b + 1) * base;
    return std::pair<int, int>{lo, hi};
  };
  for (int bi = 0; bi < m; ++bi) {
    const auto [i_lo, i_hi] = block(bi);
    for (int bj = 0; bj < m; ++bj) {
      const auto [j_lo, j_hi] = block(bj);
      double acc = 0.0;
      for (int i = i_lo; i < i_hi; ++i)
        for (int j = j_lo; j < j_hi; ++j) acc += map.at(i, j);
      out.values[static_cast<size_t>(bi) * m + bj] =
          acc / ((i_hi - i_lo) * (j_hi - j_lo));
    }
  }
  return out;
}

namespace {

void write_grid(std::ostream& os, int n, double pitch,
                const std::vector<double>& values) {
  os << n << ' ' << std::setprecision(17) << pitch << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) os << ' ';
      os << std::setprecision(17) << values[static_cast<size_t>(i) * n + j];
    }
    os << '\n';
  }
}

}  // namespace

void save(std::ostream& os, const Heatmap& map) {
  write_grid(os, map.n, map.pitch_m, map.values);
}

void save_file(const std::string& path, const Heatmap& map) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save(os, map);
}

Heatmap load(std::istream& is) {
  Heatmap map;
  if (!(is >> map.n >> map.pitch_m) || map.n < 2)
    throw std::runtime_error("malformed heatmap header");
  map.values.resize(static_cast<size_t>(map.n) * map.n);
  for (auto& v : map.values) {
    if (!(is >> v)) throw std::runtime_error("truncated heatmap grid");
  }
  return map;
}

Heatmap load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return load(is);
}

void save_coarse(std::ostream& os, const CoarseMap& map) {
  write_grid(os, map.m, 0.0, map.values);
}

void save_coarse_file(const std::string& path, const CoarseMap& map) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save_coarse(os, map);
}

}  // namespace uavnet::heatmap
