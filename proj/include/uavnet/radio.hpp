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

#ifndef UAVNET_RADIO_HPP
#define UAVNET_RADIO_HPP

#include <cmath>
#include <span>

namespace uavnet::radio {

// Ground-plane position in meters within the [0, L]^2 target area.
struct Point2D {
  double x_m = 0.0;
  double y_m = 0.0;
};

inline double ground_distance(const Point2D& a, const Point2D& b) {
  const double dx = a.x_m - b.x_m;
  const double dy = a.y_m - b.y_m;
  return std::sqrt(dx * dx + dy * dy);
}

// Radio parameters shared by all UAVs. PSDs are dBm/Hz; the single carrier
// frequency is used for all resource blocks (20 RB x 180 kHz spans < 4 MHz
// around 2 GHz, so the per-RB path-loss spread is below 0.02 dB).
struct RadioConfig {
  double altitude_m = 350.0;
  double aperture_deg = 60.0;
  double center_freq_mhz = 2000.0;
  double rb_bandwidth_hz = 180e3;
  int rb_count = 20;
  double tx_psd_dbm_hz = -49.5;
  double noise_psd_dbm_hz = -174.0;
  double excess_loss_db = 1.0;
  double min_rate_bps = 250e3;

  // throws std::invalid_argument when any invariant fails
  void validate() const;
};

// Footprint radius of the directional antenna cone: H * tan(theta / 2).
double coverage_radius(const RadioConfig& cfg);

// Air-to-ground free-space path loss in dB at 3D distance d3_m and carrier
// freq_mhz, plus the LoS excess term. Throws std::domain_error for
// nonpositive distance or frequency.
double path_loss_db(double d3_m, double freq_mhz, double eta_db);

// Per-Hz SINR in linear scale. Inputs are dBm/Hz PSDs and dB path losses;
// the arithmetic runs in linear mW/Hz. The interferer list must be exactly
// the covering UAVs transmitting on the same RB. An infinite path loss
// contributes zero power.
double sinr_linear(double serving_psd_dbm_hz, double serving_pl_db,
                   std::span<const double> interferer_pl_db,
                   double noise_psd_dbm_hz);

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double db_to_linear(double x) { return std::pow(10.0, x / 10.0); }

// Shannon rate of one RB at the given linear SINR.
double rb_rate_bps(double sinr_linear, const RadioConfig& cfg);

constexpr int kInfeasible = -1;

// Smallest k such that the first k entries of per_rb_sinr_linear carry at
// least min_rate_bps in aggregate; entries are consumed in the given
// (caller-randomized) order. Returns kInfeasible when even the full list
// falls short.
int rb_demand(std::span<const double> per_rb_sinr_linear,
              const RadioConfig& cfg);

}  // namespace uavnet::radio

#endif  // UAVNET_RADIO_HPP
