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

#include "uavnet/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace uavnet::radio {

void RadioConfig::validate() const {
  if (!(altitude_m > 0.0)) throw std::invalid_argument("altitude_m must be > 0");
  if (!(aperture_deg > 0.0 && aperture_deg < 180.0))
    throw std::invalid_argument("aperture_deg must be in (0, 180)");
  if (rb_count < 1) throw std::invalid_argument("rb_count must be >= 1");
  if (!(rb_bandwidth_hz > 0.0))
    throw std::invalid_argument("rb_bandwidth_hz must be > 0");
  if (!(min_rate_bps > 0.0))
    throw std::invalid_argument("min_rate_bps must be > 0");
  if (!(center_freq_mhz > 0.0))
    throw std::invalid_argument("center_freq_mhz must be > 0");
  const double r = coverage_radius(*this);
  if (!(std::isfinite(r) && r > 0.0))
    throw std::invalid_argument("derived coverage radius must be finite and positive");
}

double coverage_radius(const RadioConfig& cfg) {
  constexpr double kDegToRad = 0.017453292519943295;
  return cfg.altitude_m * std::tan(0.5 * cfg.aperture_deg * kDegToRad);
}

double path_loss_db(double d3_m, double freq_mhz, double eta_db) {
  if (!(d3_m > 0.0)) throw std::domain_error("distance must be > 0");
  if (!(freq_mhz > 0.0)) throw std::domain_error("frequency must be > 0");
  return 20.0 * std::log10(d3_m) + 20.0 * std::log10(freq_mhz) - 27.55 +
         eta_db;
}

double sinr_linear(double serving_psd_dbm_hz, double serving_pl_db,
                   std::span<const double> interferer_pl_db,
                   double noise_psd_dbm_hz) {
  // gain G = 10^(-PL/10); +inf PL maps to zero received power
  const double signal_mw_hz =
      db_to_linear(serving_psd_dbm_hz) * db_to_linear(-serving_pl_db);
  double denom_mw_hz = db_to_linear(noise_psd_dbm_hz);
  const double tx_mw_hz = db_to_linear(serving_psd_dbm_hz);
  for (double pl : interferer_pl_db) {
    denom_mw_hz += tx_mw_hz * db_to_linear(-pl);
  }
  return signal_mw_hz / denom_mw_hz;
}

double rb_rate_bps(double sinr_linear, const RadioConfig& cfg) {
  return cfg.rb_bandwidth_hz * std::log2(1.0 + sinr_linear);
}

int rb_demand(std::span<const double> per_rb_sinr_linear,
              const RadioConfig& cfg) {
  double rate = 0.0;
  int used = 0;
  for (double s : per_rb_sinr_linear) {
    rate += rb_rate_bps(s, cfg);
    ++used;
    if (rate >= cfg.min_rate_bps) return used;
  }
  return kInfeasible;
}

}  // namespace uavnet::radio
