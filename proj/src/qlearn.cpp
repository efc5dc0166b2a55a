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

#include "uavnet/qlearn.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace uavnet::qlearn {

void TrainConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in [0, 1]");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("discount must be in (0, 1)");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (replay_capacity < batch_size)
    throw std::invalid_argument("replay_capacity must hold one batch");
  if (episodes < 0) throw std::invalid_argument("episodes must be >= 0");
  if (steps_per_episode < 1)
    throw std::invalid_argument("steps_per_episode must be >= 1");
  if (target_sync_every < 1)
    throw std::invalid_argument("target_sync_every must be >= 1");
}

std::vector<const Transition*> ReplayBuffer::sample(int batch,
                                                    rng::SplitMix& g) const {
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (int k = 0; k < batch; ++k)
    out.push_back(&buf_[g.next_below(static_cast<std::uint32_t>(size()))]);
  return out;
}

nn::Tensor<float> to_tensor(std::span<const env::AgentState* const> states) {
  if (states.empty()) throw std::invalid_argument("empty state batch");
  const int m = states[0]->m;
  auto t = nn::Tensor<float>::make(static_cast<int>(states.size()), 3, m, m);
  const size_t stride = static_cast<size_t>(3) * m * m;
  for (size_t b = 0; b < states.size(); ++b) {
    const auto& layers = states[b]->layers;
    for (size_t k = 0; k < stride; ++k)
      t.v[b * stride + k] = static_cast<float>(layers[k]);
  }
  return t;
}

nn::Tensor<float> to_tensor(const env::AgentState& state) {
  const env::AgentState* p = &state;
  return to_tensor({&p, 1});
}

env::Action act(QNet& net, const env::AgentState& state, double epsilon,
                rng::SplitMix& g) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in [0, 1]");
  // the exploration draw happens unconditionally so the stream advances
  // the same way regardless of the branch taken
  const double coin = g.next_double();
  const std::uint32_t random_choice = g.next_below(5);
  if (coin < epsilon) return static_cast<env::Action>(random_choice);

  const auto q = net.forward(to_tensor(state), /*training=*/false);
  int best = 0;
  for (int a = 1; a < 5; ++a)
    if (q.v[a] > q.v[best]) best = a;
  return static_cast<env::Action>(best);
}

double td_update(QNet& net, QNet& target,
                 std::span<const Transition* const> batch,
                 const TrainConfig& cfg, nn::Adam<float>& opt,
                 long& update_counter) {
  const int b = static_cast<int>(batch.size());
  if (b == 0) throw std::invalid_argument("empty batch");

  std::vector<const env::AgentState*> next_states(b);
  for (int i = 0; i < b; ++i) next_states[i] = &batch[i]->next_state;
  const auto q_next =
      target.forward(to_tensor(next_states), /*training=*/false);

  std::vector<float> y(b);
  for (int i = 0; i < b; ++i) {
    float best = q_next.v[static_cast<size_t>(i) * 5];
    for (int a = 1; a < 5; ++a)
      best = std::max(best, q_next.v[static_cast<size_t>(i) * 5 + a]);
    y[i] = static_cast<float>(batch[i]->reward) +
           (batch[i]->terminal
                ? 0.0f
                : static_cast<float>(cfg.discount) * best);
  }

  std::vector<const env::AgentState*> states(b);
  for (int i = 0; i < b; ++i) states[i] = &batch[i]->state;
  const auto q = net.forward(to_tensor(states), /*training=*/true);

  auto dq = nn::Tensor<float>::make(b, 5, 1, 1);
  double loss = 0.0;
  for (int i = 0; i < b; ++i) {
    const size_t idx = static_cast<size_t>(i) * 5 + batch[i]->action;
    const float diff = q.v[idx] - y[i];
    loss += static_cast<double>(diff) * diff;
    dq.v[idx] = 2.0f * diff / static_cast<float>(b);
  }
  loss /= b;

  net.zero_grad();
  net.backward(dq);
  opt.step(net);

  ++update_counter;
  if (cfg.polyak_tau > 0.0) {
    const float tau = static_cast<float>(cfg.polyak_tau);
    auto tp = target.params();
    auto np = net.params();
    for (size_t p = 0; p < tp.size(); ++p)
      for (size_t i = 0; i < tp[p].size; ++i)
        tp[p].value[i] = (1.0f - tau) * tp[p].value[i] + tau * np[p].value[i];
    auto ta = target.aux_state();
    auto na = net.aux_state();
    for (size_t p = 0; p < ta.size(); ++p) *ta[p] = *na[p];
  } else if (update_counter % cfg.target_sync_every == 0) {
    target.copy_state_from(net);
  }
  return loss;
}

heatmap::CoarseMap coarse_map_for(const scenario::Scenario& sc,
                                  const TrainConfig& cfg) {
  const auto fine = heatmap::generate(sc.users, sc.area_side_m,
                                      cfg.heatmap_n, cfg.coh_r_m);
  const auto smoothed =
      heatmap::smooth(fine, cfg.broad_r_px, cfg.smooth_iterations);
  return heatmap::downsample(smoothed, sc.grid_m);
}

int greedy_rollout(env::Environment& environment,
                   std::span<QNet* const> nets, std::uint64_t reset_seed,
                   std::ostream* trace) {
  rng::SplitMix g(rng::mix(reset_seed, 0x9011eedULL));
  auto states = environment.reset(reset_seed);
  if (trace) environment.append_trace(*trace);
  int served = environment.last_association().total_served;
  while (!environment.done()) {
    std::vector<env::Action> actions(states.size());
    for (size_t i = 0; i < states.size(); ++i)
      actions[i] = act(*nets[i], states[i], 0.0, g);
    auto out = environment.step(actions);
    served = out.served_total;
    states = std::move(out.next_states);
    if (trace) environment.append_trace(*trace);
  }
  return served;
}

TrainResult train(const std::vector<scenario::Scenario>& pool,
                  const nn::QNetworkSpec& spec, const TrainConfig& cfg,
                  std::uint64_t seed) {
  if (pool.empty()) throw std::invalid_argument("empty scenario pool");
  cfg.validate();
  spec.validate();
  const int n_agents = pool.front().uav_count;
  for (const auto& sc : pool) {
    if (sc.uav_count != n_agents)
      throw std::invalid_argument("pool mixes UAV counts");
    if (sc.grid_m != spec.m)
      throw std::invalid_argument("scenario grid does not match network");
  }

  env::EnvConfig env_cfg;
  env_cfg.steps_per_episode = cfg.steps_per_episode;
  env_cfg.alpha1 = cfg.alpha1;
  env_cfg.alpha2 = cfg.alpha2;
  env_cfg.alpha3 = cfg.alpha3;
  env_cfg.dp = cfg.dp;
  env_cfg.use_heatmap_state = cfg.use_heatmap_state;

  std::vector<env::Environment> envs;
  envs.reserve(pool.size());
  for (const auto& sc : pool)
    envs.emplace_back(sc, coarse_map_for(sc, cfg), env_cfg);

  TrainResult result;
  std::vector<std::unique_ptr<QNet>> targets;
  std::vector<std::unique_ptr<nn::Adam<float>>> opts;
  std::vector<std::unique_ptr<ReplayBuffer>> buffers;
  const int n_learners = cfg.shared_parameters ? 1 : n_agents;
  for (int i = 0; i < n_learners; ++i) {
    auto net = std::make_shared<QNet>(spec);
    net->init(rng::mix(seed, 0x1217ULL, static_cast<std::uint64_t>(i)));
    auto target = std::make_unique<QNet>(spec);
    target->copy_state_from(*net);
    opts.push_back(std::make_unique<nn::Adam<float>>(*net, cfg.learning_rate));
    buffers.push_back(std::make_unique<ReplayBuffer>(cfg.replay_capacity));
    targets.push_back(std::move(target));
    result.nets.push_back(std::move(net));
  }
  while (static_cast<int>(result.nets.size()) < n_agents)
    result.nets.push_back(result.nets.front());

  auto learner_of = [&](int agent) {
    return cfg.shared_parameters ? 0 : agent;
  };

  // opt-in progress log for long runs; does not touch the results
  const bool verbose = std::getenv("UAVNET_TRAIN_LOG") != nullptr;

  rng::SplitMix g(rng::mix(seed, 0x7247ULL));
  std::vector<long> update_counters(n_learners, 0);
  double epsilon = cfg.epsilon;

  const int epoch_len = static_cast<int>(pool.size());
  double epoch_served = 0.0, epoch_reward = 0.0;
  long epoch_reward_samples = 0;
  int in_epoch = 0, epoch_idx = 0;
  int stop_hits = 0;
  bool stop = false;

  for (int ep = 0; ep < cfg.episodes && !stop; ++ep) {
    auto& environment = envs[ep % pool.size()];
    auto states =
        environment.reset(rng::mix(seed, 0xe9ULL,
                                   static_cast<std::uint64_t>(ep)));
    double served_acc = 0.0;
    while (!environment.done()) {
      std::vector<env::Action> actions(n_agents);
      for (int i = 0; i < n_agents; ++i)
        actions[i] = act(*result.nets[i], states[i], epsilon, g);
      auto out = environment.step(actions);
      served_acc += out.served_total;
      for (int i = 0; i < n_agents; ++i) {
        Transition t;
        t.state = std::move(states[i]);
        t.action = static_cast<int>(actions[i]);
        t.reward = out.rewards[i] * cfg.reward_scale;
        t.next_state = out.next_states[i];
        t.terminal = out.done;
        buffers[learner_of(i)]->push(std::move(t));
        epoch_reward += out.rewards[i];
        ++epoch_reward_samples;
      }
      states = std::move(out.next_states);
      // one gradient update per agent per environment step
      for (int i = 0; i < n_agents; ++i) {
        const int li = learner_of(i);
        if (static_cast<int>(buffers[li]->size()) < cfg.batch_size) continue;
        const auto batch = buffers[li]->sample(cfg.batch_size, g);
        td_update(*result.nets[i], *targets[li], batch, cfg, *opts[li],
                  update_counters[li]);
      }
    }
    result.episodes_run = ep + 1;
    epoch_served += served_acc / cfg.steps_per_episode;
    ++in_epoch;
    if (in_epoch == epoch_len) {
      result.curve.push_back(
          {epoch_idx, epoch_served / epoch_len,
           epoch_reward_samples ? epoch_reward / epoch_reward_samples : 0.0});
      epoch_served = epoch_reward = 0.0;
      epoch_reward_samples = 0;
      in_epoch = 0;
      ++epoch_idx;
    }

    epsilon = std::max(cfg.min_epsilon, epsilon * cfg.epsilon_decay);

    if (cfg.eval_every > 0 && (ep + 1) % cfg.eval_every == 0) {
      std::vector<QNet*> nets(n_agents);
      for (int i = 0; i < n_agents; ++i) nets[i] = result.nets[i].get();
      const int served = greedy_rollout(
          envs[0], nets, rng::mix(seed, 0xea17ULL));
      result.evals.push_back({ep + 1, served});
      if (verbose)
        std::cerr << "[train] episode " << (ep + 1) << " greedy_served "
                  << served << " epsilon " << epsilon << '\n';
      if (cfg.early_stop_served >= 0.0) {
        stop_hits = served >= cfg.early_stop_served ? stop_hits + 1 : 0;
        if (stop_hits >= cfg.early_stop_patience) stop = true;
      }
    }
  }
  return result;
}

namespace {
constexpr const char* kCheckpointMagic = "UAVNETQ1";
}

void save_checkpoint(const std::string& path, QNet& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  const auto& s = net.spec();
  os << kCheckpointMagic << '\n';
  os << "input_channels=" << s.input_channels << '\n';
  os << "m=" << s.m << '\n';
  os << "stem_channels=" << s.stem_channels << '\n';
  os << "residual_layers=" << s.residual_layers << '\n';
  os << "blocks_per_layer=" << s.blocks_per_layer << '\n';
  os << "action_count=" << s.action_count << '\n';
  size_t aux = 0;
  for (auto* v : net.aux_state()) aux += v->size();
  os << "params=" << net.param_count() << '\n';
  os << "aux=" << aux << '\n';
  for (auto& p : net.params())
    os.write(reinterpret_cast<const char*>(p.value),
             static_cast<std::streamsize>(p.size * sizeof(float)));
  for (auto* v : net.aux_state())
    os.write(reinterpret_cast<const char*>(v->data()),
             static_cast<std::streamsize>(v->size() * sizeof(float)));
  if (!os) throw std::runtime_error("short write: " + path);
}

std::unique_ptr<QNet> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(is, line) || line != kCheckpointMagic)
    throw std::runtime_error("not a uavnet checkpoint: " + path);

  nn::QNetworkSpec spec;
  size_t params = 0, aux = 0;
  for (int k = 0; k < 8; ++k) {
    if (!std::getline(is, line))
      throw std::runtime_error("truncated checkpoint header");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed checkpoint header line: " + line);
    const std::string key = line.substr(0, eq);
    const long val = std::stol(line.substr(eq + 1));
    if (key == "input_channels") spec.input_channels = static_cast<int>(val);
    else if (key == "m") spec.m = static_cast<int>(val);
    else if (key == "stem_channels") spec.stem_channels = static_cast<int>(val);
    else if (key == "residual_layers")
      spec.residual_layers = static_cast<int>(val);
    else if (key == "blocks_per_layer")
      spec.blocks_per_layer = static_cast<int>(val);
    else if (key == "action_count") spec.action_count = static_cast<int>(val);
    else if (key == "params") params = static_cast<size_t>(val);
    else if (key == "aux") aux = static_cast<size_t>(val);
    else throw std::runtime_error("unknown checkpoint key: " + key);
  }

  auto net = std::make_unique<QNet>(spec);
  if (net->param_count() != params)
    throw std::runtime_error("checkpoint parameter count mismatch");
  size_t aux_expect = 0;
  for (auto* v : net->aux_state()) aux_expect += v->size();
  if (aux_expect != aux)
    throw std::runtime_error("checkpoint statistics count mismatch");
  for (auto& p : net->params()) {
    is.read(reinterpret_cast<char*>(p.value),
            static_cast<std::streamsize>(p.size * sizeof(float)));
  }
  for (auto* v : net->aux_state())
    is.read(reinterpret_cast<char*>(v->data()),
            static_cast<std::streamsize>(v->size() * sizeof(float)));
  if (!is) throw std::runtime_error("truncated checkpoint blob");
  return net;
}

}  // namespace uavnet::qlearn
