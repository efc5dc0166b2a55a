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

#ifndef UAVNET_ENV_HPP
#define UAVNET_ENV_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "uavnet/association.hpp"
#include "uavnet/heatmap.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet::env {

enum class Action : int {
  forward = 0,   // +y (next grid row)
  backward = 1,  // -y
  left = 2,      // -x
  right = 3,     // +x
  hover = 4,
};

struct GridPos {
  int row = 0;
  int col = 0;
  bool operator==(const GridPos&) const = default;
};

// 3-layer M x M observation: density map | own position one-hot | global
// position counts. Row-major within each layer.
struct AgentState {
  int m = 0;
  std::vector<double> layers;  // 3 * m * m

  double density(int i, int j) const {
    return layers[static_cast<size_t>(i) * m + j];
  }
  double own(int i, int j) const {
    return layers[static_cast<size_t>(m) * m +
                  static_cast<size_t>(i) * m + j];
  }
  double global(int i, int j) const {
    return layers[2 * static_cast<size_t>(m) * m +
                  static_cast<size_t>(i) * m + j];
  }
};

struct RewardBreakdown {
  double local_num = 0.0;
  double glb_num = 0.0;
  double glb_dens = 0.0;
  double cvg_pnt = 0.0;  // penalty magnitude; enters the total negatively
  double total = 0.0;
};

struct StepOutcome {
  std::vector<AgentState> next_states;
  std::vector<double> rewards;
  int served_total = 0;
  std::vector<int> served_per_uav;
  bool done = false;
};

struct EnvConfig {
  int steps_per_episode = 30;
  double alpha1 = 1.0;
  double alpha2 = 0.5;
  double alpha3 = 1.0;
  double dp = 3.0;
  // when false, layer 1 of the state is the per-cell user-count matrix
  // instead of the downsampled heatmap (the non-heatmap ablation)
  bool use_heatmap_state = true;
};

// The multi-agent MDP. One instance is single-writer; run independent
// instances for concurrent episode collection.
class Environment {
 public:
  Environment(scenario::Scenario sc, heatmap::CoarseMap coarse,
              EnvConfig cfg = {});

  // Seeded uniform placement of UAVs on grid intersections.
  std::vector<AgentState> reset(std::uint64_t seed);

  // Moves each UAV one cell (attempts to exit the grid clamp to hover),
  // re-associates users, computes rewards. Throws std::logic_error after
  // the episode is done.
  StepOutcome step(std::span<const Action> actions);

  // Places the UAVs at the given cells (no movement constraint),
  // re-associates and recomputes rewards. The step counter is untouched;
  // useful for evaluating known placements and for fixtures.
  std::vector<AgentState> force_positions(std::span<const GridPos> cells);

  RewardBreakdown reward_components(int uav) const;

  const std::vector<GridPos>& uav_cells() const { return uav_cells_; }
  const association::AssociationOutcome& last_association() const {
    return last_outcome_;
  }
  const heatmap::CoarseMap& density_map() const { return coarse_; }
  const scenario::Scenario& scene() const { return scenario_; }
  int step_index() const { return step_index_; }
  bool done() const { return done_; }
  int agent_count() const { return scenario_.uav_count; }

  radio::Point2D cell_position(const GridPos& p) const;

  // Evaluates association for an arbitrary placement of this scenario's
  // UAVs without touching environment state.
  association::AssociationOutcome evaluate_placement(
      std::span<const GridPos> cells, std::uint64_t seed) const;

  // One JSON object per line: step, positions, served, per-agent rewards.
  void append_trace(std::ostream& os) const;

 private:
  std::vector<AgentState> build_states() const;
  void associate_now();

  scenario::Scenario scenario_;
  heatmap::CoarseMap coarse_;
  EnvConfig cfg_;
  double coverage_r_ = 0.0;
  std::vector<double> user_count_layer_;  // per-cell user counts (ablation)

  std::vector<GridPos> uav_cells_;
  association::AssociationOutcome last_outcome_;
  std::vector<double> last_rewards_;
  std::uint64_t assoc_seed_ = 0;
  int step_index_ = 0;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace uavnet::env

#endif  // UAVNET_ENV_HPP
