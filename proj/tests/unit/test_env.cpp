#include <stdexcept>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "uavnet/env.hpp"
#include "uavnet/radio.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/scenario.hpp"

using namespace uavnet;
using env::Action;
using env::GridPos;

namespace {

// 10x10 grid over a 900 m square (100 m pitch), users placed by hand
scenario::Scenario manual_scene(int uavs,
                                std::vector<radio::Point2D> users) {
  scenario::Scenario sc;
  sc.uav_count = uavs;
  sc.scattered_count = static_cast<int>(users.size());
  sc.users = std::move(users);
  return sc;
}

heatmap::CoarseMap flat_map(int m, double value) {
  heatmap::CoarseMap c;
  c.m = m;
  c.values.assign(static_cast<size_t>(m) * m, value);
  return c;
}

void check_state_invariants(const env::AgentState& s, int uav_count) {
  const int m = s.m;
  REQUIRE(static_cast<int>(s.layers.size()) == 3 * m * m);
  int ones = 0;
  double pg_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double pl = s.own(i, j);
      CHECK((pl == 0.0 || pl == 1.0));
      if (pl == 1.0) {
        ++ones;
        CHECK(s.global(i, j) >= 1.0);  // own cell counted in the global map
      }
      const double pg = s.global(i, j);
      CHECK(pg >= 0.0);
      CHECK(pg == std::floor(pg));
      pg_sum += pg;
    }
  }
  CHECK(ones == 1);
  CHECK(pg_sum == doctest::Approx(uav_count));
}

}  // namespace

TEST_CASE("reset produces valid states and is deterministic") {
  auto sc = scenario::generate_scenario(scenario::Setting::S1, 5);
  env::Environment e1(sc, flat_map(sc.grid_m, 0.0));
  env::Environment e2(sc, flat_map(sc.grid_m, 0.0));
  auto s1 = e1.reset(42);
  auto s2 = e2.reset(42);
  REQUIRE(s1.size() == 3);
  for (const auto& s : s1) check_state_invariants(s, 3);
  CHECK(e1.uav_cells() == e2.uav_cells());
  for (size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].layers == s2[i].layers);
}

TEST_CASE("single UAV: own-position layer equals the global layer") {
  auto sc = manual_scene(1, {{450, 450}});
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  auto s = e.reset(7);
  for (int i = 0; i < sc.grid_m; ++i)
    for (int j = 0; j < sc.grid_m; ++j)
      CHECK(s[0].own(i, j) == s[0].global(i, j));
}

TEST_CASE("co-located UAVs accumulate in the global position count") {
  auto sc = manual_scene(3, {{450, 450}});
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(1);
  auto states = e.force_positions(std::vector<GridPos>{{4, 4}, {4, 4}, {4, 4}});
  CHECK(states[0].global(4, 4) == 3.0);
  check_state_invariants(states[0], 3);
}

TEST_CASE("coarse map dimension mismatch is rejected") {
  auto sc = manual_scene(1, {{450, 450}});
  CHECK_THROWS_AS(env::Environment(sc, flat_map(sc.grid_m + 1, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("out-of-grid moves clamp to hover") {
  auto sc = manual_scene(1, {{450, 450}});
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(3);
  e.force_positions(std::vector<GridPos>{{0, 0}});
  auto out = e.step(std::vector<Action>{Action::backward});  // -row at edge
  CHECK(e.uav_cells()[0] == GridPos{0, 0});
  out = e.step(std::vector<Action>{Action::left});  // -col at edge
  CHECK(e.uav_cells()[0] == GridPos{0, 0});
  out = e.step(std::vector<Action>{Action::forward});
  CHECK(e.uav_cells()[0] == GridPos{1, 0});
  (void)out;
}

TEST_CASE("all-hover is a fixed point of positions and rewards") {
  auto sc = scenario::generate_scenario(scenario::Setting::S1, 9);
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(5);
  const auto cells0 = e.uav_cells();
  std::vector<Action> hover(3, Action::hover);
  auto out1 = e.step(hover);
  CHECK(e.uav_cells() == cells0);
  auto out2 = e.step(hover);
  CHECK(e.uav_cells() == cells0);
  CHECK(out1.rewards == out2.rewards);
  CHECK(out1.served_total == out2.served_total);
}

TEST_CASE("40-user hot spot under one UAV: local_num hits the RB budget") {
  // all users at the covered center need 1 RB each, 20 RBs available
  std::vector<radio::Point2D> users(40, radio::Point2D{400, 400});
  auto sc = manual_scene(1, std::move(users));
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(2);
  e.force_positions(std::vector<GridPos>{{4, 4}});  // cell (4,4) = (400,400)
  const auto r = e.reward_components(0);
  CHECK(r.local_num == 20.0);
  CHECK(r.glb_num == 20.0);  // single agent: total/1
  CHECK(r.cvg_pnt == 0.0);
}

TEST_CASE("served_total equals the association count after every step") {
  auto sc = scenario::generate_scenario(scenario::Setting::S2, 17);
  env::Environment e(sc, flat_map(sc.grid_m, 1.0));
  auto states = e.reset(11);
  rng::SplitMix g(123);
  while (!e.done()) {
    std::vector<Action> acts(3);
    for (auto& a : acts) a = static_cast<Action>(g.next_below(5));
    auto out = e.step(acts);
    CHECK(out.served_total ==
          association::count_served(e.last_association()));
    CHECK(out.served_total == e.last_association().total_served);
    for (const auto& s : out.next_states) check_state_invariants(s, 3);
    // shared reward parts identical across agents
    const auto r0 = e.reward_components(0);
    for (int i = 1; i < 3; ++i) {
      const auto ri = e.reward_components(i);
      CHECK(ri.glb_num == r0.glb_num);
      CHECK(ri.glb_dens == r0.glb_dens);
    }
    states = std::move(out.next_states);
  }
  CHECK(e.step_index() == 30);
  CHECK_THROWS_AS(e.step(std::vector<Action>(3, Action::hover)),
                  std::logic_error);
}

TEST_CASE("overlap penalty fixtures at a 200 m coverage radius") {
  // aperture chosen so r = altitude * tan(theta/2) = 200 m exactly
  auto sc = manual_scene(3, {{450, 450}});
  std::vector<radio::Point2D> users(100, radio::Point2D{450, 450});
  sc.users = users;
  sc.scattered_count = 100;
  sc.radio.aperture_deg = 2.0 * std::atan2(200.0, 350.0) * 180.0 / M_PI;
  REQUIRE(radio::coverage_radius(sc.radio) == doctest::Approx(200.0));

  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(4);
  const double p_max = 3.0 * 100.0 / 3.0;  // d_p |U| / |I| = 100

  SUBCASE("co-located pair contributes the full p_max") {
    // agents 0 and 1 share a cell; agent 2 is far beyond 2r from both
    e.force_positions(std::vector<GridPos>{{0, 0}, {0, 0}, {9, 9}});
    CHECK(e.reward_components(0).cvg_pnt == doctest::Approx(p_max));
    CHECK(e.reward_components(1).cvg_pnt == doctest::Approx(p_max));
    CHECK(e.reward_components(2).cvg_pnt == doctest::Approx(0.0));
  }
  SUBCASE("separation of exactly 2r cancels the penalty") {
    e.force_positions(std::vector<GridPos>{{0, 0}, {0, 4}, {9, 9}});
    CHECK(e.reward_components(0).cvg_pnt == doctest::Approx(0.0));
  }
  SUBCASE("separation of exactly r halves the penalty") {
    e.force_positions(std::vector<GridPos>{{0, 0}, {0, 2}, {9, 9}});
    CHECK(e.reward_components(0).cvg_pnt == doctest::Approx(0.5 * p_max));
  }
}

TEST_CASE("coverage of grid intersections at the default 202.07 m radius") {
  // pitch 100 m: straight offsets up to 2 cells and (1,1) diagonals are
  // inside the footprint; a (2,1) offset at 223.6 m is not
  auto sc = manual_scene(1, {{450, 450}});
  auto coarse = flat_map(sc.grid_m, 0.0);
  // weight only the probe cells so glb_dens counts exactly the covered ones
  auto weight = [&](int i, int j) {
    coarse.values[static_cast<size_t>(i) * sc.grid_m + j] = 1.0;
  };
  for (int di = -2; di <= 2; ++di)
    for (int dj = -2; dj <= 2; ++dj) weight(5 + di, 5 + dj);

  env::Environment e(sc, coarse);
  e.reset(6);
  e.force_positions(std::vector<GridPos>{{5, 5}});
  // covered: center, 8 straight cells (1 and 2 away), 4 diagonals = 13
  CHECK(e.reward_components(0).glb_dens == doctest::Approx(13.0));
}

TEST_CASE("one-cell move toward a hot spot raises glb_dens, not local_num") {
  // sparse users right under the UAV; dense cell two intersections away
  auto sc = manual_scene(1, {{500, 500}, {510, 490}, {490, 505}});
  auto coarse = flat_map(sc.grid_m, 0.0);
  coarse.values[5 * 10 + 8] = 6.0;  // hot spot density at cell (5,8)
  env::Environment e(sc, coarse);
  e.reset(8);
  e.force_positions(std::vector<GridPos>{{5, 5}});
  const auto before = e.reward_components(0);
  auto out = e.step(std::vector<Action>{Action::right});  // toward (5,8)
  const auto after = e.reward_components(0);
  CHECK(e.uav_cells()[0] == GridPos{5, 6});
  CHECK(after.glb_dens > before.glb_dens);
  CHECK(after.local_num == before.local_num);
  (void)out;
}

TEST_CASE("total reward combines the four parts with the configured weights") {
  env::EnvConfig cfg;
  cfg.alpha1 = 2.0;
  cfg.alpha2 = 0.25;
  cfg.alpha3 = 1.5;
  cfg.dp = 1.0;
  auto sc = scenario::generate_scenario(scenario::Setting::S1, 23);
  env::Environment e(sc, flat_map(sc.grid_m, 1.0), cfg);
  e.reset(12);
  for (int i = 0; i < 3; ++i) {
    const auto r = e.reward_components(i);
    CHECK(r.total == doctest::Approx(2.0 * r.local_num + 0.25 * r.glb_num +
                                     1.5 * r.glb_dens - r.cvg_pnt));
  }
}

TEST_CASE("non-heatmap state carries per-cell user counts") {
  env::EnvConfig cfg;
  cfg.use_heatmap_state = false;
  auto sc = manual_scene(1, {{0, 0}, {10, 0}, {890, 900}});
  env::Environment e(sc, flat_map(sc.grid_m, 7.0), cfg);
  auto s = e.reset(3);
  // (0,0) and (10,0) both snap to cell (0,0); (890,900) snaps to (9,9)
  CHECK(s[0].density(0, 0) == 2.0);
  CHECK(s[0].density(9, 9) == 1.0);
  double total = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) total += s[0].density(i, j);
  CHECK(total == 3.0);
}

TEST_CASE("episode trace lines are well-formed JSON") {
  auto sc = manual_scene(2, {{450, 450}, {300, 300}});
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(14);
  std::ostringstream os;
  e.append_trace(os);
  e.step(std::vector<Action>{Action::forward, Action::hover});
  e.append_trace(os);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("step"));
    CHECK(j["positions"].size() == 2);
    CHECK(j["rewards"].size() == 2);
    CHECK(j.contains("served_total"));
    ++lines;
  }
  CHECK(lines == 2);
}

TEST_CASE("evaluate_placement matches force_positions outcomes") {
  auto sc = scenario::generate_scenario(scenario::Setting::S1, 31);
  env::Environment e(sc, flat_map(sc.grid_m, 0.0));
  e.reset(15);
  const std::vector<GridPos> cells{{2, 3}, {7, 1}, {4, 8}};
  const auto direct = e.evaluate_placement(cells, 999);
  association::check_outcome(direct, static_cast<int>(sc.users.size()), 3,
                             sc.radio.rb_count);
  const auto direct2 = e.evaluate_placement(cells, 999);
  CHECK(direct.total_served == direct2.total_served);
  CHECK(direct.serving_uav == direct2.serving_uav);
}
