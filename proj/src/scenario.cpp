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

#include "uavnet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "uavnet/rng.hpp"

namespace uavnet::scenario {

void Scenario::validate() const {
  if (grid_m < 2) throw std::invalid_argument("grid_m must be >= 2");
  if (uav_count < 1) throw std::invalid_argument("uav_count must be >= 1");
  if (!(area_side_m > 0.0))
    throw std::invalid_argument("area_side_m must be > 0");
  radio.validate();
  int hotspot_total = 0;
  for (const auto& h : hotspots) hotspot_total += h.count;
  if (hotspot_total + scattered_count != static_cast<int>(users.size()))
    throw std::invalid_argument("hot-spot counts + scattered != user count");
  for (const auto& u : users) {
    if (u.x_m < 0.0 || u.x_m > area_side_m || u.y_m < 0.0 ||
        u.y_m > area_side_m)
      throw std::invalid_argument("user outside target area");
  }
}

Setting parse_setting(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "1" || s == "s1") return Setting::S1;
  if (s == "2" || s == "s2") return Setting::S2;
  if (s == "3" || s == "s3") return Setting::S3;
  if (s == "custom") return Setting::Custom;
  throw std::invalid_argument("unknown setting: " + name);
}

std::string setting_name(Setting s) {
  switch (s) {
    case Setting::S1: return "S1";
    case Setting::S2: return "S2";
    case Setting::S3: return "S3";
    default: return "custom";
  }
}

namespace {

struct SettingSpec {
  std::vector<int> hotspot_counts;
  int scattered = 0;
  int uavs = 3;
};

SettingSpec setting_spec(Setting s) {
  switch (s) {
    case Setting::S1: return {{15, 35, 40}, 10, 3};
    case Setting::S2: return {{20, 20, 25, 25}, 10, 3};
    case Setting::S3: return {{25, 20, 30, 25}, 0, 5};
    default: return {{}, 0, 3};
  }
}

radio::Point2D draw_in_area(rng::SplitMix& g, double side) {
  return {g.next_double() * side, g.next_double() * side};
}

// Uniform centers with minimum mutual separation; after repeated
// rejection failures the best candidate seen so far is kept so generation
// always terminates.
std::vector<radio::Point2D> draw_centers(rng::SplitMix& g, int count,
                                         double side, double min_sep) {
  std::vector<radio::Point2D> centers;
  for (int c = 0; c < count; ++c) {
    radio::Point2D best{};
    double best_min_dist = -1.0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const radio::Point2D cand = draw_in_area(g, side);
      double min_dist = std::numeric_limits<double>::infinity();
      for (const auto& prev : centers)
        min_dist = std::min(min_dist, radio::ground_distance(cand, prev));
      if (min_dist >= min_sep) {
        best = cand;
        best_min_dist = min_dist;
        break;
      }
      if (min_dist > best_min_dist) {
        best = cand;
        best_min_dist = min_dist;
      }
    }
    centers.push_back(best);
  }
  return centers;
}

}  // namespace

Scenario generate_scenario(Setting setting, std::uint64_t seed,
                           const ScenarioOverrides& ov) {
  SettingSpec spec = setting_spec(setting);
  if (setting == Setting::Custom) {
    if (!ov.hotspot_counts)
      throw std::invalid_argument("custom setting requires hotspot_counts");
    spec.hotspot_counts = *ov.hotspot_counts;
    spec.scattered = ov.scattered_count.value_or(0);
  } else {
    if (ov.hotspot_counts || ov.scattered_count)
      throw std::invalid_argument(
          "hotspot_counts/scattered_count overrides require the custom "
          "setting");
  }

  Scenario sc;
  sc.area_side_m = ov.area_side_m.value_or(900.0);
  sc.grid_m = ov.grid_m.value_or(10);
  sc.uav_count = ov.uav_count.value_or(spec.uavs);
  sc.seed = seed;
  if (ov.radio) sc.radio = *ov.radio;
  const double spread = ov.hotspot_spread_m.value_or(80.0);
  const double min_sep = ov.hotspot_min_sep_m.value_or(300.0);

  rng::SplitMix g(rng::mix(seed, 0x5ca1ab1eULL));
  const auto centers =
      draw_centers(g, static_cast<int>(spec.hotspot_counts.size()),
                   sc.area_side_m, min_sep);
  for (size_t h = 0; h < centers.size(); ++h) {
    sc.hotspots.push_back({centers[h], spec.hotspot_counts[h], spread});
    for (int k = 0; k < spec.hotspot_counts[h]; ++k) {
      // truncated Gaussian: redraw until inside the area
      radio::Point2D p;
      do {
        p.x_m = centers[h].x_m + spread * g.next_gaussian();
        p.y_m = centers[h].y_m + spread * g.next_gaussian();
      } while (p.x_m < 0.0 || p.x_m > sc.area_side_m || p.y_m < 0.0 ||
               p.y_m > sc.area_side_m);
      sc.users.push_back(p);
    }
  }
  sc.scattered_count = spec.scattered;
  for (int k = 0; k < spec.scattered; ++k)
    sc.users.push_back(draw_in_area(g, sc.area_side_m));

  sc.validate();
  return sc;
}

std::vector<Scenario> build_pool(Setting setting, int size, std::uint64_t seed,
                                 const ScenarioOverrides& overrides) {
  if (size < 1) throw std::invalid_argument("pool size must be >= 1");
  std::vector<Scenario> pool;
  pool.reserve(size);
  for (int i = 0; i < size; ++i)
    pool.push_back(generate_scenario(
        setting, rng::mix(seed, 0x9001ULL, static_cast<std::uint64_t>(i)),
        overrides));
  return pool;
}

namespace {
constexpr const char* kMagic = "# uavnet scenario v1";
}

void save(std::ostream& os, const Scenario& sc) {
  os << kMagic << '\n';
  os << std::setprecision(17);
  os << "area_side_m=" << sc.area_side_m << '\n';
  os << "grid_m=" << sc.grid_m << '\n';
  os << "uav_count=" << sc.uav_count << '\n';
  os << "seed=" << sc.seed << '\n';
  os << "scattered_count=" << sc.scattered_count << '\n';
  const auto& r = sc.radio;
  os << "radio.altitude_m=" << r.altitude_m << '\n';
  os << "radio.aperture_deg=" << r.aperture_deg << '\n';
  os << "radio.center_freq_mhz=" << r.center_freq_mhz << '\n';
  os << "radio.rb_bandwidth_hz=" << r.rb_bandwidth_hz << '\n';
  os << "radio.rb_count=" << r.rb_count << '\n';
  os << "radio.tx_psd_dbm_hz=" << r.tx_psd_dbm_hz << '\n';
  os << "radio.noise_psd_dbm_hz=" << r.noise_psd_dbm_hz << '\n';
  os << "radio.excess_loss_db=" << r.excess_loss_db << '\n';
  os << "radio.min_rate_bps=" << r.min_rate_bps << '\n';
  for (const auto& h : sc.hotspots)
    os << "hotspot=" << h.center.x_m << ' ' << h.center.y_m << ' ' << h.count
       << ' ' << h.spread_m << '\n';
  os << "users=" << sc.users.size() << '\n';
  for (const auto& u : sc.users) os << u.x_m << ' ' << u.y_m << '\n';
}

void save_file(const std::string& path, const Scenario& sc) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save(os, sc);
}

Scenario load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic)
    throw std::runtime_error("not a uavnet scenario file");
  Scenario sc;
  sc.hotspots.clear();
  long user_count = -1;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed scenario line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    std::istringstream vs(val);
    if (key == "area_side_m") vs >> sc.area_side_m;
    else if (key == "grid_m") vs >> sc.grid_m;
    else if (key == "uav_count") vs >> sc.uav_count;
    else if (key == "seed") vs >> sc.seed;
    else if (key == "scattered_count") vs >> sc.scattered_count;
    else if (key == "radio.altitude_m") vs >> sc.radio.altitude_m;
    else if (key == "radio.aperture_deg") vs >> sc.radio.aperture_deg;
    else if (key == "radio.center_freq_mhz") vs >> sc.radio.center_freq_mhz;
    else if (key == "radio.rb_bandwidth_hz") vs >> sc.radio.rb_bandwidth_hz;
    else if (key == "radio.rb_count") vs >> sc.radio.rb_count;
    else if (key == "radio.tx_psd_dbm_hz") vs >> sc.radio.tx_psd_dbm_hz;
    else if (key == "radio.noise_psd_dbm_hz") vs >> sc.radio.noise_psd_dbm_hz;
    else if (key == "radio.excess_loss_db") vs >> sc.radio.excess_loss_db;
    else if (key == "radio.min_rate_bps") vs >> sc.radio.min_rate_bps;
    else if (key == "hotspot") {
      HotSpot h;
      vs >> h.center.x_m >> h.center.y_m >> h.count >> h.spread_m;
      sc.hotspots.push_back(h);
    } else if (key == "users") {
      vs >> user_count;
      break;
    } else {
      throw std::runtime_error("unknown scenario key: " + key);
    }
    if (!vs) throw std::runtime_error("bad value for key: " + key);
  }
  if (user_count < 0) throw std::runtime_error("scenario missing users=");
  sc.users.resize(user_count);
  for (auto& u : sc.users) {
    if (!(is >> u.x_m >> u.y_m))
      throw std::runtime_error("truncated user list");
  }
  sc.validate();
  return sc;
}

Scenario load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return load(is);
}

}  // namespace uavnet::scenario
