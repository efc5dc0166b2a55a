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

#ifndef UAVNET_SCENARIO_HPP
#define UAVNET_SCENARIO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavnet/radio.hpp"

namespace uavnet::scenario {

struct HotSpot {
  radio::Point2D center;
  int count = 0;
  double spread_m = 0.0;
};

// One experiment instance: a user distribution plus everything needed to
// evaluate connectivity on it.
struct Scenario {
  double area_side_m = 900.0;
  int grid_m = 10;  // placement grid is grid_m x grid_m intersections
  int uav_count = 3;
  std::uint64_t seed = 0;
  radio::RadioConfig radio;
  std::vector<HotSpot> hotspots;
  int scattered_count = 0;
  std::vector<radio::Point2D> users;

  double grid_pitch_m() const { return area_side_m / (grid_m - 1); }
  void validate() const;  // throws std::invalid_argument
};

enum class Setting { S1, S2, S3, Custom };

Setting parse_setting(const std::string& name);  // "1"/"s1"/"S1" etc.
std::string setting_name(Setting s);

// Optional overrides; every field has a declared default.
struct ScenarioOverrides {
  std::optional<double> area_side_m;
  std::optional<int> grid_m;
  std::optional<int> uav_count;
  std::optional<double> hotspot_spread_m;     // default 80
  std::optional<double> hotspot_min_sep_m;    // default 300
  std::optional<std::vector<int>> hotspot_counts;  // Custom setting only
  std::optional<int> scattered_count;              // Custom setting only
  std::optional<radio::RadioConfig> radio;
};

// Deterministic per (setting, seed). S1: 3 UAVs, hot spots (15,35,40) + 10
// scattered; S2: 3 UAVs, (20,20,25,25) + 10; S3: 5 UAVs, (25,20,30,25) + 0.
// Hot-spot centers are uniform with minimum mutual separation; members are
// truncated Gaussians around each center. Throws std::invalid_argument on
// inconsistent overrides.
Scenario generate_scenario(Setting setting, std::uint64_t seed,
                           const ScenarioOverrides& overrides = {});

// `size` scenarios with seeds derived from `seed`; order is deterministic.
std::vector<Scenario> build_pool(Setting setting, int size,
                                 std::uint64_t seed,
                                 const ScenarioOverrides& overrides = {});

// Self-describing text format: key=value header, hot-spot lines, then one
// "x y" line per user. Round-trips exactly.
void save(std::ostream& os, const Scenario& sc);
void save_file(const std::string& path, const Scenario& sc);
Scenario load(std::istream& is);
Scenario load_file(const std::string& path);

}  // namespace uavnet::scenario

#endif  // UAVNET_SCENARIO_HPP
