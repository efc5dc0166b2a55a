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

#ifndef UAVNET_QLEARN_HPP
#define UAVNET_QLEARN_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "uavnet/env.hpp"
#include "uavnet/nn.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet::qlearn {

struct TrainConfig {
  double learning_rate = 3.5e-4;
  double epsilon = 0.1;
  double epsilon_decay = 1.0;  // multiplicative per episode; 1 = constant
  double min_epsilon = 0.01;
  double discount = 0.95;
  int batch_size = 128;
  int target_sync_every = 10;  // gradient updates between hard syncs
  double polyak_tau = 0.0;     // > 0 switches to Polyak averaging
  int replay_capacity = 20000;
  int episodes = 0;
  int steps_per_episode = 30;
  double alpha1 = 1.0, alpha2 = 0.5, alpha3 = 1.0, dp = 3.0;
  double reward_scale = 1.0;  // applied to rewards as stored in replay
  bool shared_parameters = false;
  bool use_heatmap_state = true;

  // heatmap pipeline applied to each pool scenario
  int heatmap_n = 50;
  double coh_r_m = 100.0;
  int broad_r_px = 2;
  int smooth_iterations = 3;

  // optional greedy evaluation / early stop (0 = never evaluate)
  int eval_every = 0;
  double early_stop_served = -1.0;
  int early_stop_patience = 3;

  void validate() const;  // throws std::invalid_argument
};

struct Transition {
  env::AgentState state;
  int action = 0;
  double reward = 0.0;
  env::AgentState next_state;
  bool terminal = false;
};

// FIFO ring with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(Transition t) {
    if (buf_.size() == capacity_) buf_.pop_front();
    buf_.push_back(std::move(t));
  }
  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return buf_[i]; }

  // uniform with replacement
  std::vector<const Transition*> sample(int batch, rng::SplitMix& g) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> buf_;
};

using QNet = nn::QNetwork<float>;

// [count, 3, m, m] batch tensor from agent states
nn::Tensor<float> to_tensor(std::span<const env::AgentState* const> states);
nn::Tensor<float> to_tensor(const env::AgentState& state);

// Epsilon-greedy action: uniform with probability epsilon, otherwise the
// argmax of the inference-mode forward (ties to the lowest action index).
env::Action act(QNet& net, const env::AgentState& state, double epsilon,
                rng::SplitMix& g);

// One minibatch TD step: loss = mean (Q(s,a) - y)^2 with
// y = r + discount * max_a' Q_target(s', a') * (1 - terminal).
// Returns the loss; syncs target from net every target_sync_every updates
// (or Polyak-averages every update when polyak_tau > 0).
double td_update(QNet& net, QNet& target,
                 std::span<const Transition* const> batch,
                 const TrainConfig& cfg, nn::Adam<float>& opt,
                 long& update_counter);

struct LearningCurvePoint {
  int epoch = 0;
  double mean_served = 0.0;
  double mean_reward = 0.0;
};

struct EvalPoint {
  int episode = 0;
  int greedy_served = 0;
};

struct TrainResult {
  // one entry per agent; with shared parameters all entries alias one net
  std::vector<std::shared_ptr<QNet>> nets;
  std::vector<LearningCurvePoint> curve;
  std::vector<EvalPoint> evals;
  int episodes_run = 0;
};

// Heatmap pipeline for one scenario: generate -> smooth -> downsample to
// the placement grid.
heatmap::CoarseMap coarse_map_for(const scenario::Scenario& sc,
                                  const TrainConfig& cfg);

// The training loop: episodes round-robin over the pool, one environment
// step per agent per gradient update, independent (or shared) replay and
// networks. Deterministic given seed.
TrainResult train(const std::vector<scenario::Scenario>& pool,
                  const nn::QNetworkSpec& spec, const TrainConfig& cfg,
                  std::uint64_t seed);

// Greedy policy rollout from a seeded reset; returns the served_total
// after the final step. `trace` (optional) receives JSON-lines.
int greedy_rollout(env::Environment& environment,
                   std::span<QNet* const> nets, std::uint64_t reset_seed,
                   std::ostream* trace = nullptr);

// Versioned checkpoint: text header with the network spec, then the flat
// float32 parameter and batch-norm statistics blob.
void save_checkpoint(const std::string& path, QNet& net);
std::unique_ptr<QNet> load_checkpoint(const std::string& path);

}  // namespace uavnet::qlearn

#endif  // UAVNET_QLEARN_HPP
