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

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavnet/baselines.hpp"
#include "uavnet/env.hpp"
#include "uavnet/heatmap.hpp"
#include "uavnet/qlearn.hpp"
#include "uavnet/scenario.hpp"

namespace fs = std::filesystem;
using namespace uavnet;

namespace {

// exit codes: 0 success, 2 config error, 3 I/O error, 4 oracle budget
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBudget = 4;

struct CommonOpts {
  std::string setting = "1";
  std::uint64_t seed = 0;
  std::string out = ".";
  int grid_m = 0;    // 0 = setting default
  int uav_count = 0; // 0 = setting default
  int threads = 1;   // accepted for interface stability; runs are
                     // single-threaded for reproducibility
};

struct HeatmapOpts {
  int n = 50;
  double coh_r = 100.0;
  int broad_r = 2;
  int smooth_iters = 3;
};

scenario::ScenarioOverrides overrides_of(const CommonOpts& c) {
  scenario::ScenarioOverrides ov;
  if (c.grid_m > 0) ov.grid_m = c.grid_m;
  if (c.uav_count > 0) ov.uav_count = c.uav_count;
  return ov;
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() +
                                    " for writing");
  return os;
}

// resolved key=value dump beside the outputs, for reproducibility audits
void write_resolved_config(
    const fs::path& dir, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& kv) {
  auto os = open_out(dir / (command + "_resolved.cfg"));
  os << "command=" << command << '\n';
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
  if (!os) throw std::runtime_error("short write of resolved config");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nn::QNetworkSpec preset_spec(const std::string& name, int m) {
  nn::QNetworkSpec spec;
  if (name == "desk")
    spec = nn::QNetworkSpec::desk();
  else if (name == "paper")
    spec = nn::QNetworkSpec::paper();
  else
    throw std::invalid_argument("unknown net preset: " + name);
  spec.m = m;
  return spec;
}

// ---------------------------------------------------------------- scenario

int cmd_scenario(const CommonOpts& common, int pool_size) {
  if (pool_size < 1) throw std::invalid_argument("pool size must be >= 1");
  const auto setting = scenario::parse_setting(common.setting);
  const auto pool = scenario::build_pool(setting, pool_size, common.seed,
                                         overrides_of(common));
  const auto dir = prepare_out_dir(common.out);
  for (size_t i = 0; i < pool.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "scenario_%04zu.txt", i);
    scenario::save_file((dir / name).string(), pool[i]);
  }
  write_resolved_config(dir, "scenario",
                        {{"setting", common.setting},
                         {"seed", std::to_string(common.seed)},
                         {"pool_size", std::to_string(pool_size)},
                         {"grid_m", std::to_string(pool[0].grid_m)},
                         {"uav_count", std::to_string(pool[0].uav_count)}});
  std::cout << "wrote " << pool.size() << " scenario files to "
            << dir.string() << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- heatmap

int cmd_heatmap(const CommonOpts& common, const HeatmapOpts& hm,
                const std::string& scenario_path) {
  const auto sc = scenario::load_file(scenario_path);
  const auto fine =
      heatmap::generate(sc.users, sc.area_side_m, hm.n, hm.coh_r);
  const auto smoothed = heatmap::smooth(fine, hm.broad_r, hm.smooth_iters);
  const auto coarse = heatmap::downsample(smoothed, sc.grid_m);

  const auto dir = prepare_out_dir(common.out);
  heatmap::save_file((dir / "heatmap.txt").string(), smoothed);
  heatmap::save_coarse_file((dir / "coarse.txt").string(), coarse);
  write_resolved_config(dir, "heatmap",
                        {{"scenario", scenario_path},
                         {"n", std::to_string(hm.n)},
                         {"coh_r_m", fmt(hm.coh_r)},
                         {"broad_r_px", std::to_string(hm.broad_r)},
                         {"smooth_iterations",
                          std::to_string(hm.smooth_iters)}});
  std::cout << "wrote heatmap.txt and coarse.txt to " << dir.string()
            << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainOpts {
  int pool_size = 1;
  int episodes = 100;
  std::string net_preset = "desk";
  qlearn::TrainConfig cfg;
  bool no_heatmap_state = false;
  bool shared_parameters = false;
};

int cmd_train(const CommonOpts& common, const HeatmapOpts& hm,
              TrainOpts& t) {
  const auto setting = scenario::parse_setting(common.setting);
  const auto pool = scenario::build_pool(setting, t.pool_size, common.seed,
                                         overrides_of(common));
  t.cfg.episodes = t.episodes;
  t.cfg.use_heatmap_state = !t.no_heatmap_state;
  t.cfg.shared_parameters = t.shared_parameters;
  t.cfg.heatmap_n = hm.n;
  t.cfg.coh_r_m = hm.coh_r;
  t.cfg.broad_r_px = hm.broad_r;
  t.cfg.smooth_iterations = hm.smooth_iters;
  t.cfg.validate();
  const auto spec = preset_spec(t.net_preset, pool[0].grid_m);

  const auto result = qlearn::train(pool, spec, t.cfg, common.seed);

  const auto dir = prepare_out_dir(common.out);
  for (size_t i = 0; i < result.nets.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "agent_%zu.ckpt", i);
    qlearn::save_checkpoint((dir / name).string(), *result.nets[i]);
  }
  {
    auto os = open_out(dir / "curve.csv");
    os << "epoch,mean_served,mean_reward\n";
    for (const auto& p : result.curve)
      os << p.epoch << ',' << fmt(p.mean_served) << ','
         << fmt(p.mean_reward) << '\n';
  }
  if (!result.evals.empty()) {
    auto os = open_out(dir / "evals.csv");
    os << "episode,greedy_served\n";
    for (const auto& e : result.evals)
      os << e.episode << ',' << e.greedy_served << '\n';
  }
  write_resolved_config(
      dir, "train",
      {{"setting", common.setting},
       {"seed", std::to_string(common.seed)},
       {"pool_size", std::to_string(t.pool_size)},
       {"episodes", std::to_string(t.episodes)},
       {"episodes_run", std::to_string(result.episodes_run)},
       {"net_preset", t.net_preset},
       {"grid_m", std::to_string(pool[0].grid_m)},
       {"uav_count", std::to_string(pool[0].uav_count)},
       {"learning_rate", fmt(t.cfg.learning_rate)},
       {"epsilon", fmt(t.cfg.epsilon)},
       {"discount", fmt(t.cfg.discount)},
       {"batch_size", std::to_string(t.cfg.batch_size)},
       {"target_sync_every", std::to_string(t.cfg.target_sync_every)},
       {"replay_capacity", std::to_string(t.cfg.replay_capacity)},
       {"use_heatmap_state",
        t.cfg.use_heatmap_state ? "true" : "false"},
       {"shared_parameters",
        t.cfg.shared_parameters ? "true" : "false"}});
  std::cout << "trained " << result.episodes_run << " episodes; outputs in "
            << dir.string() << '\n';
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
  std::string scenario_path;
  std::vector<std::string> checkpoints;
  std::vector<std::string> checkpoints_nonhm;
  std::string oracle = "auto";  // auto | exhaustive | greedy | none
  int kmeans_k = 0;             // 0 = one cluster per UAV
  std::uint64_t rollout_seed = 0;
};

int eval_rollout(const scenario::Scenario& sc,
                 const std::vector<std::string>& ckpts, bool heatmap_state,
                 const HeatmapOpts& hm, std::uint64_t rollout_seed) {
  qlearn::TrainConfig cfg;
  cfg.heatmap_n = hm.n;
  cfg.coh_r_m = hm.coh_r;
  cfg.broad_r_px = hm.broad_r;
  cfg.smooth_iterations = hm.smooth_iters;
  env::EnvConfig env_cfg;
  env_cfg.use_heatmap_state = heatmap_state;
  env::Environment e(sc, qlearn::coarse_map_for(sc, cfg), env_cfg);

  std::vector<std::unique_ptr<qlearn::QNet>> nets;
  std::vector<qlearn::QNet*> ptrs;
  for (const auto& path : ckpts) {
    nets.push_back(qlearn::load_checkpoint(path));
    if (nets.back()->spec().m != sc.grid_m)
      throw std::invalid_argument("checkpoint grid size " +
                                  std::to_string(nets.back()->spec().m) +
                                  " does not match scenario grid " +
                                  std::to_string(sc.grid_m));
    ptrs.push_back(nets.back().get());
  }
  if (static_cast<int>(ptrs.size()) != sc.uav_count)
    throw std::invalid_argument("need one checkpoint per UAV (" +
                                std::to_string(sc.uav_count) + ")");
  return qlearn::greedy_rollout(e, ptrs, rollout_seed);
}

int cmd_eval(const CommonOpts& common, const HeatmapOpts& hm,
             const EvalOpts& ev) {
  scenario::Scenario sc;
  if (!ev.scenario_path.empty()) {
    sc = scenario::load_file(ev.scenario_path);
  } else {
    sc = scenario::generate_scenario(scenario::parse_setting(common.setting),
                                     common.seed, overrides_of(common));
  }

  std::vector<std::pair<std::string, int>> rows;

  if (!ev.checkpoints.empty())
    rows.emplace_back("learned",
                      eval_rollout(sc, ev.checkpoints, true, hm,
                                   ev.rollout_seed));
  if (!ev.checkpoints_nonhm.empty())
    rows.emplace_back("learned-nonhm",
                      eval_rollout(sc, ev.checkpoints_nonhm, false, hm,
                                   ev.rollout_seed));

  const int k = ev.kmeans_k > 0 ? ev.kmeans_k : sc.uav_count;
  rows.emplace_back("kmeans",
                    baselines::kmeans_place(sc, k, common.seed).served_total);

  if (ev.oracle == "exhaustive") {
    rows.emplace_back(
        "oracle-exhaustive",
        baselines::exhaustive_oracle(sc, common.seed).served_total);
  } else if (ev.oracle == "greedy") {
    rows.emplace_back("oracle-greedy",
                      baselines::greedy_oracle(sc, common.seed).served_total);
  } else if (ev.oracle == "auto") {
    try {
      rows.emplace_back(
          "oracle-exhaustive",
          baselines::exhaustive_oracle(sc, common.seed).served_total);
    } catch (const baselines::BudgetExceeded&) {
      rows.emplace_back(
          "oracle-greedy",
          baselines::greedy_oracle(sc, common.seed).served_total);
    }
  } else if (ev.oracle != "none") {
    throw std::invalid_argument("unknown oracle mode: " + ev.oracle);
  }

  const auto dir = prepare_out_dir(common.out);
  {
    auto os = open_out(dir / "eval.csv");
    os << "method,served_total,user_count\n";
    for (const auto& [method, served] : rows)
      os << method << ',' << served << ',' << sc.users.size() << '\n';
  }
  write_resolved_config(
      dir, "eval",
      {{"setting", common.setting},
       {"seed", std::to_string(common.seed)},
       {"scenario", ev.scenario_path.empty() ? "<generated>"
                                             : ev.scenario_path},
       {"oracle", ev.oracle},
       {"kmeans_k", std::to_string(k)},
       {"rollout_seed", std::to_string(ev.rollout_seed)},
       {"checkpoints", std::to_string(ev.checkpoints.size())},
       {"checkpoints_nonhm",
        std::to_string(ev.checkpoints_nonhm.size())}});
  for (const auto& [method, served] : rows)
    std::cout << method << ": " << served << " / " << sc.users.size()
              << '\n';
  return kExitOk;
}

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--setting", c.setting,
                  "user-distribution setting: 1, 2, 3 or custom");
  sub->add_option("--seed", c.seed, "base RNG seed (no wall-clock defaults)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--grid-m", c.grid_m,
                  "override placement-grid dimension M");
  sub->add_option("--uav-count", c.uav_count, "override UAV count");
  sub->add_option("--threads", c.threads,
                  "worker cap (runs are single-threaded deterministic)");
}

void add_heatmap(CLI::App* sub, HeatmapOpts& h) {
  sub->add_option("--heatmap-n", h.n, "fine heatmap dimension N");
  sub->add_option("--coh-r", h.coh_r, "counting radius in meters");
  sub->add_option("--broad-r", h.broad_r, "smoothing half-window in pixels");
  sub->add_option("--smooth-iters", h.smooth_iters,
                  "smoothing iterations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-UAV downlink connectivity: simulator and optimizer"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");

  CommonOpts sc_common, hm_common, tr_common, ev_common;
  HeatmapOpts hm_hm, tr_hm, ev_hm;
  int pool_size = 1;
  std::string heatmap_scenario;
  TrainOpts tr;
  EvalOpts ev;

  auto* sub_sc = app.add_subcommand("scenario", "generate a scenario pool");
  add_common(sub_sc, sc_common);
  sub_sc->add_option("--pool-size", pool_size, "number of scenarios");

  auto* sub_hm =
      app.add_subcommand("heatmap", "heatmap pipeline for one scenario");
  add_common(sub_hm, hm_common);
  add_heatmap(sub_hm, hm_hm);
  sub_hm->add_option("--scenario", heatmap_scenario, "scenario file")
      ->required();

  auto* sub_tr = app.add_subcommand("train", "train the multi-agent policy");
  add_common(sub_tr, tr_common);
  add_heatmap(sub_tr, tr_hm);
  sub_tr->add_option("--pool-size", tr.pool_size, "training pool size");
  sub_tr->add_option("--episodes", tr.episodes, "training episodes");
  sub_tr->add_option("--net-preset", tr.net_preset,
                     "network preset: desk or paper");
  sub_tr->add_option("--lr", tr.cfg.learning_rate, "learning rate");
  sub_tr->add_option("--epsilon", tr.cfg.epsilon, "exploration rate");
  sub_tr->add_option("--epsilon-decay", tr.cfg.epsilon_decay,
                     "multiplicative exploration decay per episode");
  sub_tr->add_option("--min-epsilon", tr.cfg.min_epsilon,
                     "exploration floor");
  sub_tr->add_option("--reward-scale", tr.cfg.reward_scale,
                     "reward scaling applied in the replay buffer");
  sub_tr->add_option("--alpha1", tr.cfg.alpha1, "local service weight");
  sub_tr->add_option("--alpha2", tr.cfg.alpha2, "global service weight");
  sub_tr->add_option("--alpha3", tr.cfg.alpha3, "density reward weight");
  sub_tr->add_option("--gamma", tr.cfg.discount, "discount factor");
  sub_tr->add_option("--batch-size", tr.cfg.batch_size, "minibatch size");
  sub_tr->add_option("--target-sync-every", tr.cfg.target_sync_every,
                     "gradient updates between target syncs");
  sub_tr->add_option("--replay-capacity", tr.cfg.replay_capacity,
                     "replay buffer capacity");
  sub_tr->add_option("--steps-per-episode", tr.cfg.steps_per_episode,
                     "environment steps per episode");
  sub_tr->add_option("--eval-every", tr.cfg.eval_every,
                     "greedy evaluation period in episodes (0 = never)");
  sub_tr->add_option("--early-stop-served", tr.cfg.early_stop_served,
                     "stop when greedy evaluation reaches this service");
  sub_tr->add_flag("--no-heatmap-state", tr.no_heatmap_state,
                   "use per-cell user counts instead of the heatmap");
  sub_tr->add_flag("--shared-parameters", tr.shared_parameters,
                   "all agents share one network");

  auto* sub_ev =
      app.add_subcommand("eval", "compare policies, baselines and oracles");
  add_common(sub_ev, ev_common);
  add_heatmap(sub_ev, ev_hm);
  sub_ev->add_option("--scenario", ev.scenario_path,
                     "scenario file (default: generate from setting+seed)");
  sub_ev->add_option("--checkpoint", ev.checkpoints,
                     "per-agent checkpoint for the learned policy");
  sub_ev->add_option("--checkpoint-nonhm", ev.checkpoints_nonhm,
                     "per-agent checkpoint for the non-heatmap ablation");
  sub_ev->add_option("--oracle", ev.oracle,
                     "oracle mode: auto, exhaustive, greedy or none");
  sub_ev->add_option("--kmeans-k", ev.kmeans_k,
                     "cluster count (0 = one per UAV)");
  sub_ev->add_option("--rollout-seed", ev.rollout_seed,
                     "environment reset seed for policy rollouts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sub_sc->parsed()) return cmd_scenario(sc_common, pool_size);
    if (sub_hm->parsed())
      return cmd_heatmap(hm_common, hm_hm, heatmap_scenario);
    if (sub_tr->parsed()) return cmd_train(tr_common, tr_hm, tr);
    if (sub_ev->parsed()) return cmd_eval(ev_common, ev_hm, ev);
    return kExitConfig;
  } catch (const baselines::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
