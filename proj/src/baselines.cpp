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

#include "uavnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavnet/rng.hpp"

namespace uavnet::baselines {

namespace {

radio::Point2D cell_position(const scenario::Scenario& sc,
                             const env::GridPos& p) {
  const double pitch = sc.grid_pitch_m();
  return {p.col * pitch, p.row * pitch};
}

std::vector<radio::Point2D> positions_of(
    const scenario::Scenario& sc, const std::vector<env::GridPos>& cells) {
  std::vector<radio::Point2D> out(cells.size());
  for (size_t i = 0; i < cells.size(); ++i)
    out[i] = cell_position(sc, cells[i]);
  return out;
}

PlacementResult evaluate(const scenario::Scenario& sc,
                         std::vector<env::GridPos> cells,
                         std::uint64_t seed) {
  PlacementResult r;
  r.outcome = association::associate(sc.users, positions_of(sc, cells),
                                     sc.radio, seed);
  r.served_total = r.outcome.total_served;
  r.uav_grid_positions = std::move(cells);
  return r;
}

env::GridPos snap_to_grid(const scenario::Scenario& sc,
                          const radio::Point2D& p) {
  const double pitch = sc.grid_pitch_m();
  const int m = sc.grid_m;
  int col = static_cast<int>(std::lround(p.x_m / pitch));
  int row = static_cast<int>(std::lround(p.y_m / pitch));
  return {std::min(std::max(row, 0), m - 1),
          std::min(std::max(col, 0), m - 1)};
}

double sq_dist(const radio::Point2D& a, const radio::Point2D& b) {
  const double dx = a.x_m - b.x_m;
  const double dy = a.y_m - b.y_m;
  return dx * dx + dy * dy;
}

}  // namespace

std::uint64_t multiset_placement_count(int m, int k) {
  // C(m^2 + k - 1, k) with saturation
  const std::uint64_t cells = static_cast<std::uint64_t>(m) * m;
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = cells + static_cast<std::uint64_t>(i) - 1;
    if (c > cap / num) return cap;
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

PlacementResult kmeans_place(const scenario::Scenario& sc, int k,
                             std::uint64_t seed) {
  sc.validate();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto& users = sc.users;
  const radio::Point2D area_center{sc.area_side_m / 2.0,
                                   sc.area_side_m / 2.0};
  const int n = static_cast<int>(users.size());

  std::vector<radio::Point2D> best_centers;
  double best_sse = std::numeric_limits<double>::infinity();
  const int effective_k = std::min(k, n);

  if (effective_k > 0) {
    rng::SplitMix g(rng::mix(seed, 0x3ea45ULL));
    constexpr int kRestarts = 10;
    constexpr int kMaxIter = 100;
    std::vector<int> order(n);
    for (int restart = 0; restart < kRestarts; ++restart) {
      // distinct random users as the initial centers
      for (int i = 0; i < n; ++i) order[i] = i;
      g.shuffle(order.begin(), order.end());
      std::vector<radio::Point2D> centers(effective_k);
      for (int c = 0; c < effective_k; ++c) centers[c] = users[order[c]];

      std::vector<int> assign(n, -1);
      for (int it = 0; it < kMaxIter; ++it) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          int best = 0;
          double bd = sq_dist(users[u], centers[0]);
          for (int c = 1; c < effective_k; ++c) {
            const double d = sq_dist(users[u], centers[c]);
            if (d < bd) {
              bd = d;
              best = c;
            }
          }
          if (assign[u] != best) {
            assign[u] = best;
            changed = true;
          }
        }
        if (!changed && it > 0) break;
        std::vector<radio::Point2D> sums(effective_k, {0.0, 0.0});
        std::vector<int> counts(effective_k, 0);
        for (int u = 0; u < n; ++u) {
          sums[assign[u]].x_m += users[u].x_m;
          sums[assign[u]].y_m += users[u].y_m;
          ++counts[assign[u]];
        }
        for (int c = 0; c < effective_k; ++c) {
          if (counts[c] == 0) continue;  // empty cluster keeps its center
          centers[c] = {sums[c].x_m / counts[c], sums[c].y_m / counts[c]};
        }
      }
      double sse = 0.0;
      for (int u = 0; u < n; ++u) sse += sq_dist(users[u], centers[assign[u]]);
      if (sse < best_sse) {
        best_sse = sse;
        best_centers = centers;
      }
    }
  }

  std::vector<env::GridPos> cells;
  cells.reserve(k);
  for (const auto& c : best_centers) cells.push_back(snap_to_grid(sc, c));
  while (static_cast<int>(cells.size()) < k)
    cells.push_back(snap_to_grid(sc, area_center));
  return evaluate(sc, std::move(cells), seed);
}

PlacementResult exhaustive_oracle(const scenario::Scenario& sc,
                                  std::uint64_t seed, std::uint64_t budget) {
  sc.validate();
  const int m = sc.grid_m;
  const int k = sc.uav_count;
  const std::uint64_t count = multiset_placement_count(m, k);
  if (count > budget)
    throw BudgetExceeded("exhaustive search needs " + std::to_string(count) +
                         " placements, budget is " + std::to_string(budget));

  const int cells = m * m;
  auto cell_of = [m](int flat) {
    return env::GridPos{flat / m, flat % m};
  };

  // non-decreasing flat indices enumerate multisets in lexicographic order
  std::vector<int> idx(k, 0);
  PlacementResult best;
  best.served_total = -1;
  std::vector<env::GridPos> placement(k);
  for (;;) {
    for (int i = 0; i < k; ++i) placement[i] = cell_of(idx[i]);
    auto r = evaluate(sc, placement, seed);
    // strict improvement only: the first (lexicographically smallest)
    // placement wins ties
    if (r.served_total > best.served_total) best = std::move(r);

    int pos = k - 1;
    while (pos >= 0 && idx[pos] == cells - 1) --pos;
    if (pos < 0) break;
    const int next = idx[pos] + 1;
    for (int i = pos; i < k; ++i) idx[i] = next;
  }
  return best;
}

PlacementResult greedy_oracle(const scenario::Scenario& sc,
                              std::uint64_t seed) {
  sc.validate();
  const int m = sc.grid_m;
  std::vector<env::GridPos> chosen;
  for (int placed = 0; placed < sc.uav_count; ++placed) {
    env::GridPos best_cell{0, 0};
    int best_served = -1;
    std::vector<env::GridPos> trial = chosen;
    trial.push_back({0, 0});
    for (int row = 0; row < m; ++row) {
      for (int col = 0; col < m; ++col) {
        trial.back() = {row, col};
        const auto out = association::associate(
            sc.users, positions_of(sc, trial), sc.radio, seed);
        if (out.total_served > best_served) {
          best_served = out.total_served;
          best_cell = {row, col};
        }
      }
    }
    chosen.push_back(best_cell);
  }
  return evaluate(sc, std::move(chosen), seed);
}

}  // namespace uavnet::baselines
