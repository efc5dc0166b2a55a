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

#ifndef UAVNET_BASELINES_HPP
#define UAVNET_BASELINES_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uavnet/association.hpp"
#include "uavnet/env.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet::baselines {

struct PlacementResult {
  std::vector<env::GridPos> uav_grid_positions;
  int served_total = 0;
  association::AssociationOutcome outcome;
};

// Thrown when the exhaustive search space exceeds its placement budget;
// callers should fall back to greedy_oracle.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Number of UAV position multisets on an m x m grid: C(m^2 + k - 1, k).
// Saturates at the maximum representable value instead of overflowing.
std::uint64_t multiset_placement_count(int m, int k);

// Seeded Lloyd iterations on the user positions (10 restarts, at most 100
// iterations each, convergence when assignments stabilize; best restart by
// within-cluster squared error). Centroids snap to the nearest grid
// intersection; connectivity is then evaluated through associate(). With
// fewer users than k, surplus UAVs go to the area center.
PlacementResult kmeans_place(const scenario::Scenario& sc, int k,
                             std::uint64_t seed);

// Enumerates every UAV position multiset on the grid and returns the
// placement with the maximum served_total (ties resolve to the
// lexicographically smallest placement). Throws BudgetExceeded when the
// multiset count is above `budget`.
PlacementResult exhaustive_oracle(const scenario::Scenario& sc,
                                  std::uint64_t seed,
                                  std::uint64_t budget = 200000);

// Places UAVs one at a time, each at the intersection with the best
// marginal served_total given the earlier placements (ties to the
// lexicographically smallest cell).
PlacementResult greedy_oracle(const scenario::Scenario& sc,
                              std::uint64_t seed);

}  // namespace uavnet::baselines

#endif  // UAVNET_BASELINES_HPP
