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

#ifndef UAVNET_ASSOCIATION_HPP
#define UAVNET_ASSOCIATION_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "uavnet/radio.hpp"

namespace uavnet::association {

constexpr int kUnserved = -1;

struct AssociationOutcome {
  std::vector<int> serving_uav;  // per user; kUnserved when not admitted
  // per UAV: admitted user -> RB indices granted by that UAV
  std::vector<std::map<int, std::vector<int>>> rb_assignment;
  std::vector<int> served_count_per_uav;
  int total_served = 0;
};

// Two-stage association with greedy RB admission.
//
// Stage 1: every user ranks its covering UAVs by SINR under the full-load
// assumption (all other covering UAVs interfering on every RB) and
// requests the best one. Each UAV serves requests in descending reported
// SINR (ties to the lower user index); per candidate it draws a seeded
// random order of its still-free RBs and admits iff the RB demand is
// feasible against the interference already committed by other UAVs.
// Stage 2: unadmitted users retry their next-best covering UAV, in waves,
// until admitted or out of candidates. UAVs process requests in index
// order within each wave.
//
// Deterministic given rng_seed. An empty UAV list yields an all-unserved
// outcome.
AssociationOutcome associate(std::span<const radio::Point2D> user_positions,
                             std::span<const radio::Point2D> uav_positions,
                             const radio::RadioConfig& cfg,
                             std::uint64_t rng_seed);

int count_served(const AssociationOutcome& outcome);

// Checks C1-C3 and internal consistency; throws std::logic_error with a
// description of the first violation found.
void check_outcome(const AssociationOutcome& outcome, int user_count,
                   int uav_count, int rb_count);

}  // namespace uavnet::association

#endif  // UAVNET_ASSOCIATION_HPP
