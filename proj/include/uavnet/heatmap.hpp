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

#ifndef UAVNET_HEATMAP_HPP
#define UAVNET_HEATMAP_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavnet/radio.hpp"

namespace uavnet::heatmap {

struct HeatmapParams {
  double coh_r_m = 100.0;
  int broad_r_px = 2;
  int iterations = 3;
};

// N x N density grid over the target area. Pixel (i, j) sits at ground
// position (x = j * pitch, y = i * pitch) with pitch = L / (N - 1), i.e.
// pixels are the grid intersections. Row-major storage.
struct Heatmap {
  int n = 0;
  double pitch_m = 0.0;
  std::vector<double> values;
  HeatmapParams params;

  double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return values[static_cast<size_t>(i) * n + j];
  }
};

// M x M density grid aligned to the placement-grid intersections.
struct CoarseMap {
  int m = 0;
  std::vector<double> values;

  double at(int i, int j) const {
    return values[static_cast<size_t>(i) * m + j];
  }
};

// Count-within-disc transform: pixel (i, j) counts the users within
// Euclidean distance coh_r_m of its grid intersection. No smoothing.
// Users outside [0, area_side_m]^2 are an argument error.
Heatmap generate(std::span<const radio::Point2D> users, double area_side_m,
                 int n, double coh_r_m);

// Iterated clipped box-mean: each pass replaces every pixel with the mean
// of the (2*broad_r_px+1)^2 window clipped to the grid bounds, with a full
// buffer swap between passes.
Heatmap smooth(const Heatmap& map, int broad_r_px, int iterations);

// Block-mean reduction to an m x m grid; when n is not a multiple of m the
// remainder rows/columns fold into the last block.
CoarseMap downsample(const Heatmap& map, int m);

// Flat text format: first line "N pitch_m", then N rows of N values.
void save(std::ostream& os, const Heatmap& map);
void save_file(const std::string& path, const Heatmap& map);
Heatmap load(std::istream& is);
Heatmap load_file(const std::string& path);

void save_coarse(std::ostream& os, const CoarseMap& map);
void save_coarse_file(const std::string& path, const CoarseMap& map);

}  // namespace uavnet::heatmap

#endif  // UAVNET_HEATMAP_HPP
