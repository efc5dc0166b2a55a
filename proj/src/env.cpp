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

#include "uavnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "uavnet/rng.hpp"

namespace uavnet::env {

Environment::Environment(scenario::Scenario sc, heatmap::CoarseMap coarse,
                         EnvConfig cfg)
    : scenario_(std::move(sc)), coarse_(std::move(coarse)), cfg_(cfg) {
  scenario_.validate();
  if (coarse_.m != scenario_.grid_m)
    throw std::invalid_argument(
        "coarse map dimension does not match the placement grid");
  coverage_r_ = radio::coverage_radius(scenario_.radio);

  // per-cell user counts: each user tallied at its nearest intersection
  const int m = scenario_.grid_m;
  user_count_layer_.assign(static_cast<size_t>(m) * m, 0.0);
  const double pitch = scenario_.grid_pitch_m();
  for (const auto& u : scenario_.users) {
    int col = static_cast<int>(std::lround(u.x_m / pitch));
    int row = static_cast<int>(std::lround(u.y_m / pitch));
    col = std::min(std::max(col, 0), m - 1);
    row = std::min(std::max(row, 0), m - 1);
    user_count_layer_[static_cast<size_t>(row) * m + col] += 1.0;
  }
}

radio::Point2D Environment::cell_position(const GridPos& p) const {
  const double pitch = scenario_.grid_pitch_m();
  return {p.col * pitch, p.row * pitch};
}

std::vector<AgentState> Environment::reset(std::uint64_t seed) {
  rng::SplitMix g(rng::mix(seed, 0xe2150ULL));
  const int m = scenario_.grid_m;
  uav_cells_.resize(scenario_.uav_count);
  for (auto& p : uav_cells_) {
    p.row = static_cast<int>(g.next_below(m));
    p.col = static_cast<int>(g.next_below(m));
  }
  // one association stream per episode, so identical positions reproduce
  // identical RB draws within the episode
  assoc_seed_ = rng::mix(seed, 0xa550cULL);
  step_index_ = 0;
  done_ = false;
  started_ = true;
  associate_now();
  last_rewards_.assign(scenario_.uav_count, 0.0);
  for (int i = 0; i < scenario_.uav_count; ++i)
    last_rewards_[i] = reward_components(i).total;
  return build_states();
}

void Environment::associate_now() {
  std::vector<radio::Point2D> uav_pos(uav_cells_.size());
  for (size_t i = 0; i < uav_cells_.size(); ++i)
    uav_pos[i] = cell_position(uav_cells_[i]);
  last_outcome_ = association::associate(scenario_.users, uav_pos,
                                         scenario_.radio, assoc_seed_);
}

association::AssociationOutcome Environment::evaluate_placement(
    std::span<const GridPos> cells, std::uint64_t seed) const {
  std::vector<radio::Point2D> uav_pos(cells.size());
  for (size_t i = 0; i < cells.size(); ++i)
    uav_pos[i] = cell_position(cells[i]);
  return association::associate(scenario_.users, uav_pos, scenario_.radio,
                                seed);
}

std::vector<AgentState> Environment::force_positions(
    std::span<const GridPos> cells) {
  if (!started_) throw std::logic_error("force_positions before reset");
  if (static_cast<int>(cells.size()) != scenario_.uav_count)
    throw std::invalid_argument("one cell per UAV required");
  const int m = scenario_.grid_m;
  for (const auto& p : cells)
    if (p.row < 0 || p.row >= m || p.col < 0 || p.col >= m)
      throw std::invalid_argument("cell outside the placement grid");
  uav_cells_.assign(cells.begin(), cells.end());
  associate_now();
  for (int i = 0; i < scenario_.uav_count; ++i)
    last_rewards_[i] = reward_components(i).total;
  return build_states();
}

StepOutcome Environment::step(std::span<const Action> actions) {
  if (!started_) throw std::logic_error("step before reset");
  if (done_) throw std::logic_error("step after episode end");
  if (static_cast<int>(actions.size()) != scenario_.uav_count)
    throw std::invalid_argument("one action per UAV required");

  const int m = scenario_.grid_m;
  for (size_t i = 0; i < actions.size(); ++i) {
    GridPos p = uav_cells_[i];
    switch (actions[i]) {
      case Action::forward: p.row += 1; break;
      case Action::backward: p.row -= 1; break;
      case Action::left: p.col -= 1; break;
      case Action::right: p.col += 1; break;
      case Action::hover: break;
      default: throw std::invalid_argument("invalid action value");
    }
    // leaving the grid degenerates to hovering
    if (p.row >= 0 && p.row < m && p.col >= 0 && p.col < m)
      uav_cells_[i] = p;
  }

  associate_now();

  StepOutcome out;
  out.served_total = last_outcome_.total_served;
  out.served_per_uav = last_outcome_.served_count_per_uav;
  out.rewards.resize(scenario_.uav_count);
  for (int i = 0; i < scenario_.uav_count; ++i)
    out.rewards[i] = reward_components(i).total;
  last_rewards_ = out.rewards;

  ++step_index_;
  done_ = step_index_ >= cfg_.steps_per_episode;
  out.done = done_;
  out.next_states = build_states();
  return out;
}

RewardBreakdown Environment::reward_components(int uav) const {
  if (!started_) throw std::logic_error("reward before reset");
  const int m = scenario_.grid_m;
  const int n_uavs = scenario_.uav_count;
  RewardBreakdown r;

  r.local_num = last_outcome_.served_count_per_uav[uav];
  r.glb_num = static_cast<double>(last_outcome_.total_served) / n_uavs;

  // covered-density term, identical for all agents
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const radio::Point2D cell = cell_position({i, j});
      bool covered = false;
      for (const auto& p : uav_cells_) {
        if (radio::ground_distance(cell, cell_position(p)) <= coverage_r_) {
          covered = true;
          break;
        }
      }
      if (covered) r.glb_dens += coarse_.at(i, j);
    }
  }

  // pairwise overlap penalty, capped at p_max per pair when co-located
  const double p_max =
      cfg_.dp * static_cast<double>(scenario_.users.size()) / n_uavs;
  const radio::Point2D own = cell_position(uav_cells_[uav]);
  for (int j = 0; j < n_uavs; ++j) {
    if (j == uav) continue;
    const double d = radio::ground_distance(own, cell_position(uav_cells_[j]));
    r.cvg_pnt += std::max(0.0, 1.0 - d / (2.0 * coverage_r_)) * p_max;
  }

  r.total = cfg_.alpha1 * r.local_num + cfg_.alpha2 * r.glb_num +
            cfg_.alpha3 * r.glb_dens - r.cvg_pnt;
  return r;
}

std::vector<AgentState> Environment::build_states() const {
  const int m = scenario_.grid_m;
  const size_t plane = static_cast<size_t>(m) * m;

  std::vector<double> density(plane);
  if (cfg_.use_heatmap_state) {
    for (size_t k = 0; k < plane; ++k) density[k] = coarse_.values[k];
  } else {
    density = user_count_layer_;
  }

  std::vector<double> global(plane, 0.0);
  for (const auto& p : uav_cells_)
    global[static_cast<size_t>(p.row) * m + p.col] += 1.0;

  std::vector<AgentState> states(scenario_.uav_count);
  for (int i = 0; i < scenario_.uav_count; ++i) {
    auto& s = states[i];
    s.m = m;
    s.layers.assign(3 * plane, 0.0);
    std::copy(density.begin(), density.end(), s.layers.begin());
    s.layers[plane + static_cast<size_t>(uav_cells_[i].row) * m +
             uav_cells_[i].col] = 1.0;
    std::copy(global.begin(), global.end(), s.layers.begin() + 2 * plane);
  }
  return states;
}

void Environment::append_trace(std::ostream& os) const {
  nlohmann::json j;
  j["step"] = step_index_;
  auto positions = nlohmann::json::array();
  for (const auto& p : uav_cells_)
    positions.push_back({p.row, p.col});
  j["positions"] = positions;
  j["served_total"] = last_outcome_.total_served;
  j["served_per_uav"] = last_outcome_.served_count_per_uav;
  j["rewards"] = last_rewards_;
  os << j.dump() << '\n';
}

}  // namespace uavnet::env
