#include <stdexcept>
#include <sstream>

#include "doctest.h"
#include "uavnet/scenario.hpp"

using namespace uavnet;
using scenario::Setting;

TEST_CASE("setting presets") {
  SUBCASE("S1: 3 UAVs, (15,35,40) + 10 scattered") {
    const auto sc = scenario::generate_scenario(Setting::S1, 42);
    CHECK(sc.users.size() == 100);
    CHECK(sc.uav_count == 3);
    REQUIRE(sc.hotspots.size() == 3);
    CHECK(sc.hotspots[0].count == 15);
    CHECK(sc.hotspots[1].count == 35);
    CHECK(sc.hotspots[2].count == 40);
    CHECK(sc.scattered_count == 10);
  }

  SUBCASE("S2: 3 UAVs, 4 hot spots + 10 scattered") {
    const auto sc = scenario::generate_scenario(Setting::S2, 43);
    CHECK(sc.users.size() == 100);
    CHECK(sc.uav_count == 3);
    CHECK(sc.hotspots.size() == 4);
  }

  SUBCASE("S3: 5 UAVs, all users in hot spots") {
    const auto sc = scenario::generate_scenario(Setting::S3, 44);
    CHECK(sc.users.size() == 100);
    CHECK(sc.uav_count == 5);
    int total = 0;
    for (const auto& h : sc.hotspots) total += h.count;
    CHECK(total == 100);
    CHECK(sc.scattered_count == 0);
  }
}

TEST_CASE("determinism and area bounds across seeds") {
  for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
    const auto a = scenario::generate_scenario(Setting::S2, seed);
    const auto b = scenario::generate_scenario(Setting::S2, seed);
    REQUIRE(a.users.size() == b.users.size());
    for (size_t i = 0; i < a.users.size(); ++i) {
      CHECK(a.users[i].x_m == b.users[i].x_m);
      CHECK(a.users[i].y_m == b.users[i].y_m);
      CHECK(a.users[i].x_m >= 0.0);
      CHECK(a.users[i].x_m <= a.area_side_m);
      CHECK(a.users[i].y_m >= 0.0);
      CHECK(a.users[i].y_m <= a.area_side_m);
    }
  }
}

TEST_CASE("hot-spot membership counts hold for every seed") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto sc = scenario::generate_scenario(Setting::S1, seed);
    REQUIRE(sc.hotspots.size() == 3);
    CHECK(sc.hotspots[0].count + sc.hotspots[1].count +
              sc.hotspots[2].count + sc.scattered_count ==
          static_cast<int>(sc.users.size()));
  }
}

TEST_CASE("custom setting") {
  scenario::ScenarioOverrides ov;
  ov.hotspot_counts = std::vector<int>{5, 7};
  ov.scattered_count = 3;
  ov.uav_count = 2;
  const auto sc = scenario::generate_scenario(Setting::Custom, 7, ov);
  CHECK(sc.users.size() == 15);
  CHECK(sc.uav_count == 2);

  // preset settings refuse count overrides
  CHECK_THROWS_AS(scenario::generate_scenario(Setting::S1, 7, ov),
                  std::invalid_argument);
  // custom without counts is an error
  CHECK_THROWS_AS(
      scenario::generate_scenario(Setting::Custom, 7, {}),
      std::invalid_argument);
}

TEST_CASE("pool generation") {
  const auto pool = scenario::build_pool(Setting::S1, 75, 5);
  CHECK(pool.size() == 75);
  // distinct derived seeds
  for (size_t i = 1; i < pool.size(); ++i)
    CHECK(pool[i].seed != pool[0].seed);

  const auto pool2 = scenario::build_pool(Setting::S1, 75, 5);
  for (size_t i = 0; i < pool.size(); ++i) {
    CHECK(pool[i].seed == pool2[i].seed);
    CHECK(pool[i].users[0].x_m == pool2[i].users[0].x_m);
  }

  const auto single = scenario::build_pool(Setting::S3, 1, 5);
  CHECK(single.size() == 1);
}

TEST_CASE("scenario file round trip") {
  const auto sc = scenario::generate_scenario(Setting::S2, 77);
  std::stringstream ss;
  scenario::save(ss, sc);
  const auto back = scenario::load(ss);
  CHECK(back.area_side_m == sc.area_side_m);
  CHECK(back.grid_m == sc.grid_m);
  CHECK(back.uav_count == sc.uav_count);
  CHECK(back.seed == sc.seed);
  CHECK(back.radio.rb_count == sc.radio.rb_count);
  CHECK(back.radio.tx_psd_dbm_hz == sc.radio.tx_psd_dbm_hz);
  REQUIRE(back.users.size() == sc.users.size());
  for (size_t i = 0; i < sc.users.size(); ++i) {
    CHECK(back.users[i].x_m == sc.users[i].x_m);
    CHECK(back.users[i].y_m == sc.users[i].y_m);
  }
  REQUIRE(back.hotspots.size() == sc.hotspots.size());
  for (size_t i = 0; i < sc.hotspots.size(); ++i)
    CHECK(back.hotspots[i].count == sc.hotspots[i].count);
}

TEST_CASE("malformed scenario files are rejected") {
  std::stringstream empty("");
  CHECK_THROWS(scenario::load(empty));
  std::stringstream wrong("# not a scenario\n");
  CHECK_THROWS(scenario::load(wrong));
  std::stringstream truncated(
      "# uavnet scenario v1\narea_side_m=900\nusers=5\n1 2\n");
  CHECK_THROWS(scenario::load(truncated));
}
