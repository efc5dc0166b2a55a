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

#include "uavnet/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "uavnet/rng.hpp"

namespace uavnet::association {

namespace {

struct LinkTable {
  int users = 0;
  int uavs = 0;
  // linear channel gain 10^(-PL/10); 0 when the UAV does not cover the user
  std::vector<double> gain;
  double tx_mw_hz = 0.0;
  double noise_mw_hz = 0.0;

  double g(int uav, int user) const {
    return gain[static_cast<size_t>(uav) * users + user];
  }
  bool covers(int uav, int user) const { return g(uav, user) > 0.0; }
};

LinkTable build_links(std::span<const radio::Point2D> users,
                      std::span<const radio::Point2D> uavs,
                      const radio::RadioConfig& cfg) {
  LinkTable t;
  t.users = static_cast<int>(users.size());
  t.uavs = static_cast<int>(uavs.size());
  t.gain.assign(static_cast<size_t>(t.users) * t.uavs, 0.0);
  t.tx_mw_hz = radio::db_to_linear(cfg.tx_psd_dbm_hz);
  t.noise_mw_hz = radio::db_to_linear(cfg.noise_psd_dbm_hz);

  const double r = radio::coverage_radius(cfg);
  for (int i = 0; i < t.uavs; ++i) {
    for (int u = 0; u < t.users; ++u) {
      const double d_ground = radio::ground_distance(uavs[i], users[u]);
      if (d_ground > r) continue;  // outside the antenna cone: no power
      const double d3 = std::sqrt(cfg.altitude_m * cfg.altitude_m +
                                  d_ground * d_ground);
      const double pl =
          radio::path_loss_db(d3, cfg.center_freq_mhz, cfg.excess_loss_db);
      t.gain[static_cast<size_t>(i) * t.users + u] =
          radio::db_to_linear(-pl);
    }
  }
  return t;
}

// Ranking SINR under the full-load assumption: every other covering UAV
// interferes on every RB. Assignment-independent, so each user's UAV
// preference order is fixed before any admission happens.
double full_load_sinr(const LinkTable& t, int uav, int user) {
  double interf = 0.0;
  for (int j = 0; j < t.uavs; ++j)
    if (j != uav) interf += t.tx_mw_hz * t.g(j, user);
  return t.tx_mw_hz * t.g(uav, user) / (t.noise_mw_hz + interf);
}

}  // namespace

AssociationOutcome associate(std::span<const radio::Point2D> user_positions,
                             std::span<const radio::Point2D> uav_positions,
                             const radio::RadioConfig& cfg,
                             std::uint64_t rng_seed) {
  cfg.validate();
  const LinkTable links = build_links(user_positions, uav_positions, cfg);
  const int n_users = links.users;
  const int n_uavs = links.uavs;

  AssociationOutcome out;
  out.serving_uav.assign(n_users, kUnserved);
  out.rb_assignment.resize(n_uavs);
  out.served_count_per_uav.assign(n_uavs, 0);

  // per-user preference list: covering UAVs by descending full-load SINR,
  // ties to the lower UAV index
  std::vector<std::vector<int>> preference(n_users);
  std::vector<std::vector<double>> rank_sinr(n_users);
  for (int u = 0; u < n_users; ++u) {
    rank_sinr[u].assign(n_uavs, 0.0);
    for (int i = 0; i < n_uavs; ++i) {
      if (!links.covers(i, u)) continue;
      rank_sinr[u][i] = full_load_sinr(links, i, u);
      preference[u].push_back(i);
    }
    std::stable_sort(preference[u].begin(), preference[u].end(),
                     [&](int a, int b) {
                       if (rank_sinr[u][a] != rank_sinr[u][b])
                         return rank_sinr[u][a] > rank_sinr[u][b];
                       return a < b;
                     });
  }

  // committed[i][m]: UAV i has granted RB m to some admitted user
  std::vector<std::vector<char>> committed(
      n_uavs, std::vector<char>(cfg.rb_count, 0));

  auto per_rb_sinr = [&](int uav, int user, int rb) {
    double interf = 0.0;
    for (int j = 0; j < n_uavs; ++j) {
      if (j == uav || !committed[j][rb]) continue;
      interf += links.tx_mw_hz * links.g(j, user);
    }
    return links.tx_mw_hz * links.g(uav, user) /
           (links.noise_mw_hz + interf);
  };

  std::vector<int> next_pref(n_users, 0);

  bool any_request = true;
  while (any_request) {
    any_request = false;
    // requests for this wave, grouped per UAV
    std::vector<std::vector<int>> requests(n_uavs);
    for (int u = 0; u < n_users; ++u) {
      if (out.serving_uav[u] != kUnserved) continue;
      if (next_pref[u] >= static_cast<int>(preference[u].size())) continue;
      requests[preference[u][next_pref[u]]].push_back(u);
      ++next_pref[u];
      any_request = true;
    }

    for (int i = 0; i < n_uavs; ++i) {
      auto& reqs = requests[i];
      std::stable_sort(reqs.begin(), reqs.end(), [&](int a, int b) {
        if (rank_sinr[a][i] != rank_sinr[b][i])
          return rank_sinr[a][i] > rank_sinr[b][i];
        return a < b;
      });
      for (int u : reqs) {
        std::vector<int> free_rbs;
        for (int m = 0; m < cfg.rb_count; ++m)
          if (!committed[i][m]) free_rbs.push_back(m);
        if (free_rbs.empty()) continue;

        // replayable per-(UAV, user) RB order
        rng::SplitMix stream(rng::mix(rng_seed,
                                      static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(u)));
        stream.shuffle(free_rbs.begin(), free_rbs.end());

        double rate = 0.0;
        int demand = radio::kInfeasible;
        for (size_t k = 0; k < free_rbs.size(); ++k) {
          rate += radio::rb_rate_bps(per_rb_sinr(i, u, free_rbs[k]), cfg);
          if (rate >= cfg.min_rate_bps) {
            demand = static_cast<int>(k) + 1;
            break;
          }
        }
        if (demand == radio::kInfeasible) continue;

        std::vector<int> granted(free_rbs.begin(), free_rbs.begin() + demand);
        for (int m : granted) committed[i][m] = 1;
        out.rb_assignment[i][u] = std::move(granted);
        out.serving_uav[u] = i;
        ++out.served_count_per_uav[i];
        ++out.total_served;
      }
    }
  }

  return out;
}

int count_served(const AssociationOutcome& outcome) {
  int n = 0;
  for (int s : outcome.serving_uav)
    if (s != kUnserved) ++n;
  return n;
}

void check_outcome(const AssociationOutcome& out, int user_count,
                   int uav_count, int rb_count) {
  if (static_cast<int>(out.serving_uav.size()) != user_count)
    throw std::logic_error("serving_uav size mismatch");
  if (static_cast<int>(out.rb_assignment.size()) != uav_count)
    throw std::logic_error("rb_assignment size mismatch");

  std::vector<int> served_per_uav(uav_count, 0);
  for (int u = 0; u < user_count; ++u) {
    const int s = out.serving_uav[u];
    if (s == kUnserved) continue;
    if (s < 0 || s >= uav_count)
      throw std::logic_error("serving UAV index out of range");  // C1/C2
    ++served_per_uav[s];
  }

  for (int i = 0; i < uav_count; ++i) {
    int granted_total = 0;
    std::vector<char> seen(rb_count, 0);
    for (const auto& [u, rbs] : out.rb_assignment[i]) {
      if (out.serving_uav[u] != i)
        throw std::logic_error("RB grant to a user served elsewhere");  // C2
      if (rbs.empty()) throw std::logic_error("served user granted no RBs");
      for (int m : rbs) {
        if (m < 0 || m >= rb_count)
          throw std::logic_error("RB index out of range");
        if (seen[m]) throw std::logic_error("RB granted twice");  // C3
        seen[m] = 1;
      }
      granted_total += static_cast<int>(rbs.size());
    }
    if (granted_total > rb_count)
      throw std::logic_error("RB budget exceeded");  // C3
    if (static_cast<int>(out.rb_assignment[i].size()) != served_per_uav[i])
      throw std::logic_error("rb_assignment/serving_uav inconsistent");
    if (out.served_count_per_uav[i] != served_per_uav[i])
      throw std::logic_error("served_count_per_uav inconsistent");
  }
  if (out.total_served != count_served(out))
    throw std::logic_error("total_served inconsistent");
}

}  // namespace uavnet::association
