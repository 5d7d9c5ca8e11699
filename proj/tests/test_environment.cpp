#include <cmath>
#include <set>

#include "doctest.h"
#include "malltwin/environment.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/random.hpp"
#include "malltwin/synthetic.hpp"
#include "test_support.hpp"

using namespace malltwin;
using malltwin::testing::flat_day;
using malltwin::testing::shipped_config;
using malltwin::testing::small_config;

TEST_CASE("action grid") {
  CHECK(kActionSpace.size() == 25);
  CHECK(kNumActions == 25);
  CHECK(kActionSpace.temperature(0) == 17.0);
  CHECK(kActionSpace.temperature(24) == 29.0);
  for (int i = 0; i < 25; ++i) {
    CHECK(kActionSpace.temperature(i) == 17.0 + 0.5 * i);
    CHECK(kActionSpace.index_of(kActionSpace.temperature(i)) == i);
  }
  CHECK(kActionSpace.index_of(25.0) == 16);
  CHECK_FALSE(kActionSpace.index_of(25.3).has_value());
  CHECK_FALSE(kActionSpace.index_of(16.5).has_value());
  CHECK_FALSE(kActionSpace.index_of(29.5).has_value());
}

TEST_CASE("topologies") {
  const auto c = shipped_config();
  const auto central = make_zones(c.mall, Topology::Centralized);
  REQUIRE(central.size() == 1);
  CHECK(central[0].area_m2 == c.mall.total_area_m2);
  CHECK(central[0].stores.size() == c.mall.stores.size());
  const auto dist = make_zones(c.mall, Topology::Distributed);
  REQUIRE(dist.size() == c.mall.stores.size());
  double area = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(dist[i].name == c.mall.stores[i].name);
    CHECK(dist[i].area_m2 == c.mall.stores[i].area_m2);
    area += dist[i].area_m2;
  }
  CHECK(area == doctest::Approx(central[0].area_m2));
  CHECK(parse_topology("distributed") == Topology::Distributed);
  CHECK(to_string(Topology::Centralized) == "centralized");
  CHECK_THROWS_AS(parse_topology("hybrid"), ConfigError);
}

TEST_CASE("occupancy apportionment") {
  ScenarioConfig c = small_config();
  c.groups = {{"G", "g", "x", 22, 26}};
  const auto zones = make_zones(c.mall, Topology::Distributed);
  CheckpointEntry e;
  e.time = TimeOfDay::from_hm(10, 0);

  e.group_counts["G"] = 100;
  e.group_distributions["G"] = {{"Alpha", 0.5}, {"Beta", 0.25}, {"Gamma", 0.25}};
  CHECK(occupancy(e, zones[0], c.groups) == std::vector<int>{50});

  e.group_counts["G"] = 0;
  for (const auto& z : zones) CHECK(occupancy(e, z, c.groups) == std::vector<int>{0});

  e.group_counts["G"] = 10;
  e.group_distributions["G"] = {{"Alpha", 1.0 / 3}, {"Beta", 1.0 / 3}, {"Gamma", 1.0 / 3}};
  const auto split = apportion_occupancy(e, zones, c.groups);
  CHECK(split[0][0] == 4);
  CHECK(split[1][0] == 3);
  CHECK(split[2][0] == 3);
}

TEST_CASE("apportionment conserves counts on random inputs") {
  const auto c = shipped_config();
  const auto zones = make_zones(c.mall, Topology::Distributed);
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    CheckpointEntry e;
    for (const auto& g : c.groups) {
      e.group_counts[g.name] = static_cast<int>(rng.below(500));
      StoreDistribution d;
      double sum = 0.0;
      for (const auto& s : c.mall.stores) sum += d[s.name] = rng.below(4) == 0 ? 0.0 : rng.uniform();
      if (sum == 0.0) d[c.mall.stores[0].name] = sum = 1.0;
      for (auto& [k, v] : d) v /= sum;
      e.group_distributions[g.name] = d;
    }
    const auto split = apportion_occupancy(e, zones, c.groups);
    for (std::size_t g = 0; g < c.groups.size(); ++g) {
      int total = 0;
      for (std::size_t z = 0; z < zones.size(); ++z) {
        CHECK(split[z][g] >= 0);
        // Each zone is within one person of its exact share.
        const double exact = e.group_counts[c.groups[g].name] *
                             e.group_distributions[c.groups[g].name][zones[z].name];
        CHECK(std::abs(split[z][g] - exact) < 1.0);
        total += split[z][g];
      }
      CHECK(total == e.group_counts[c.groups[g].name]);
    }
  }
}

TEST_CASE("votes") {
  const std::vector<PopulationGroup> one{{"A", "a", "x", 22, 26}};
  CHECK(cast_votes(std::vector<int>{10}, one, 20.0) == VoteTally{10, 0, 0});
  CHECK(cast_votes(std::vector<int>{10}, one, 24.0) == VoteTally{0, 0, 10});
  CHECK(cast_votes(std::vector<int>{10}, one, 22.0) == VoteTally{0, 0, 10});
  CHECK(cast_votes(std::vector<int>{10}, one, 26.0) == VoteTally{0, 0, 10});
  CHECK(cast_votes(std::vector<int>{10}, one, 26.5) == VoteTally{0, 10, 0});
  const std::vector<PopulationGroup> two{{"A", "a", "x", 22, 26}, {"B", "b", "x", 18, 23}};
  CHECK(cast_votes(std::vector<int>{10, 5}, two, 24.5) == VoteTally{0, 5, 10});
}

TEST_CASE("comfort score") {
  CHECK(comfort_score({3, 2, 10}) == 15.0);
  CHECK(comfort_score({0, 0, 0}) == 0.0);
  CHECK(comfort_score({0, 0, 100}) == 200.0);
}

TEST_CASE("comfort is maximal iff the setpoint is in range") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double low = 17.0 + 0.5 * static_cast<double>(rng.below(16));
    const double high = low + 0.5 * static_cast<double>(1 + rng.below(8));
    const std::vector<PopulationGroup> g{{"G", "g", "x", low, high}};
    const int n = 1 + static_cast<int>(rng.below(200));
    for (int a = 0; a < kNumActions; ++a) {
      const double t = kActionSpace.temperature(a);
      const double score = comfort_score(cast_votes(std::vector<int>{n}, g, t));
      CHECK((score == 2.0 * n) == (t >= low && t <= high));
    }
  }
}

TEST_CASE("energy model") {
  const EnergyModelParams p;
  const Zone mall{"mall", 4890.0, {}};
  // m = 4890 * 3 * 1.275 = 18704.25 kg; E = m * 1000 * 5 / 3 J.
  const double expected_j = 18704.25 * 1000.0 * 5.0 / 3.0;
  CHECK(energy_usage_kwh(p, mall, 3.0, 25.0) == doctest::Approx(expected_j / 3.6e6).epsilon(1e-12));
  CHECK(energy_usage_kwh(p, mall, 3.0, 25.0) == doctest::Approx(8.659).epsilon(1e-3));
  CHECK(energy_usage_kwh(p, mall, 3.0, 30.0) == 0.0);
  CHECK(energy_usage_kwh(p, mall, 3.0, 31.0) == 0.0);
  CHECK(energy_usage_kwh(p, mall, 3.0, 29.0) == doctest::Approx(18704.25 * 1000.0 / 3.0 / 3.6e6));
  double prev = energy_usage_kwh(p, mall, 3.0, 17.0);
  for (double t = 17.0; t <= 31.0; t += 0.25) {
    const double e = energy_usage_kwh(p, mall, 3.0, t);
    CHECK(e <= prev);
    CHECK(e >= 0.0);
    prev = e;
  }
}

TEST_CASE("reward arithmetic") {
  const RewardWeights kwh{2.2, 1.0 / 220.0, 1.0};
  const auto r = make_reward(kwh, 15.0, 220.0);
  CHECK(r.total == doctest::Approx(32.0).epsilon(1e-12));
  CHECK(r.energy_units == 220.0);

  const RewardWeights comfort_only{2.2, 0.0, 3600.0};
  CHECK(make_reward(comfort_only, 15.0, 220.0).total == doctest::Approx(33.0));
  CHECK(make_reward(RewardWeights{}, 0.0, 0.0).total == 0.0);

  const RewardWeights kj{2.2, 1.0 / 220.0, 3600.0};
  const auto k = make_reward(kj, 10.0, 2.0);
  CHECK(k.energy_units == 7200.0);
  CHECK(k.total == doctest::Approx(2.2 * 10.0 - 7200.0 / 220.0).epsilon(1e-12));
}

TEST_CASE("observation encoding") {
  auto c = small_config();
  Observation o;
  o.time = TimeOfDay::from_hm(11, 0);
  o.time_frac = 0.5;
  o.outdoor_temp_c = 29.0;
  o.indoor_temp_c = 17.0;
  o.occupancy_by_group = {0, 0};
  auto f = encode_observation(o, c);
  REQUIRE(f.size() == 8);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
  CHECK(f[3] == 0.5);
  CHECK(f[4] == 1.0);
  CHECK(f[5] == 0.0);

  o.votes = {1, 2, 7};
  o.occupancy_by_group = {4, 6};
  o.indoor_temp_c = 29.0;
  f = encode_observation(o, c);
  CHECK(f[0] == doctest::Approx(0.1));
  CHECK(f[1] == doctest::Approx(0.2));
  CHECK(f[2] == doctest::Approx(0.7));
  CHECK(f[5] == 1.0);
  CHECK(f[6] == doctest::Approx(4.0 / 100.0));
  CHECK(f[7] == doctest::Approx(6.0 / 100.0));

  c.observation.layout = StateLayout::GroupByStore;
  o.occupancy_by_store = {5, 3, 2};
  CHECK(encode_observation(o, c).size() == 11);
  const auto zones = make_zones(c.mall, Topology::Centralized);
  CHECK(feature_dim(c, zones[0]) == 11);
}

TEST_CASE("time fraction at 15:00 is one half") {
  auto c = small_config();
  c.mall.close_time = TimeOfDay::from_hm(20, 0);
  const auto day = flat_day(c, "d", {1, 1}, {1, 0, 0});
  const auto zones = make_zones(c.mall, Topology::Centralized);
  ZoneEnvironment env(c, zones[0], zone_traces(c, day, zones)[0], c.reward);
  env.reset();
  for (int i = 0; i < 10; ++i) env.step(16);
  CHECK(env.observation().time.str() == "15:00");
  CHECK(env.observation().time_frac == 0.5);
}

TEST_CASE("episode steps and per-step reward") {
  auto c = small_config();
  const auto day = flat_day(c, "d", {10, 4}, {0.5, 0.3, 0.2});
  const auto zones = make_zones(c.mall, Topology::Centralized);
  ZoneEnvironment env(c, zones[0], zone_traces(c, day, zones)[0], c.reward);
  const auto& first = env.reset();
  CHECK(first.indoor_temp_c == 25.0);
  CHECK(first.votes == VoteTally{0, 4, 10});
  CHECK(env.steps_per_episode() == 4);

  int steps = 0;
  while (!env.done()) {
    const auto r = env.step(14);  // 24 degC
    ++steps;
    const double expected_energy = 600.0 * 3.0 * 1.275 * 1000.0 * 6.0 / 3.0 / 3.6e6;
    CHECK(r.reward.energy_kwh == doctest::Approx(expected_energy).epsilon(1e-12));
    if (steps < 4) {
      CHECK(r.next.votes == VoteTally{0, 4, 10});
      CHECK(r.reward.comfort_score == 20.0 - 4.0);
    } else {
      CHECK(r.next.votes.total() == 0);
      CHECK(r.reward.comfort_score == 0.0);
      CHECK(r.done);
    }
    CHECK(r.reward.total == doctest::Approx(c.reward.w_c * r.reward.comfort_score -
                                            c.reward.w_e * r.reward.energy_kwh * c.reward.energy_units_per_kwh)
                                .epsilon(1e-12));
  }
  CHECK(steps == 4);
  CHECK_THROWS_AS(env.step(0), ConfigError);
  env.reset();
  CHECK_THROWS_AS(env.step(25), ConfigError);
  CHECK_THROWS_AS(env.step(-1), ConfigError);
}

TEST_CASE("shipped days: per-step invariants across topologies") {
  const auto c = shipped_config();
  const auto days = generate_synthetic_dataset(c, 21, 5);
  Rng rng(8);
  for (const auto& day : days) {
    const auto central_zones = make_zones(c.mall, Topology::Centralized);
    const auto dist_zones = make_zones(c.mall, Topology::Distributed);
    const auto central = zone_traces(c, day, central_zones);
    const auto dist = zone_traces(c, day, dist_zones);
    for (std::size_t k = 0; k < day.entries.size(); ++k) {
      for (std::size_t g = 0; g < c.groups.size(); ++g) {
        int sum = 0;
        for (const auto& t : dist) sum += t.by_group[k][g];
        CHECK(sum == central[0].by_group[k][g]);
      }
    }
    int steps_central = -1;
    for (std::size_t z = 0; z < dist_zones.size() + 1; ++z) {
      const bool is_central = z == dist_zones.size();
      const Zone& zone = is_central ? central_zones[0] : dist_zones[z];
      ZoneEnvironment env(c, zone, is_central ? central[0] : dist[z], c.reward);
      env.reset();
      int steps = 0;
      while (!env.done()) {
        const auto r = env.step(static_cast<int>(rng.below(kNumActions)));
        ++steps;
        CHECK(r.next.votes.total() == r.next.occupancy());
        CHECK(std::abs(r.reward.total - (c.reward.w_c * r.reward.comfort_score -
                                         c.reward.w_e * r.reward.energy_units)) <= 1e-9);
        CHECK(static_cast<int>(env.features().size()) == env.feature_dim());
      }
      if (steps_central < 0) steps_central = steps;
      CHECK(steps == steps_central);
      CHECK(steps == static_cast<int>(checkpoints(c.mall).size()));
    }
  }
}

TEST_CASE("outdoor temperature trace feeds state and energy") {
  auto c = small_config();
  c.energy.outdoor_temp_c_by_checkpoint = {30, 32, 28, 26};
  const auto day = flat_day(c, "d", {1, 1}, {1, 0, 0});
  const auto zones = make_zones(c.mall, Topology::Centralized);
  ZoneEnvironment env(c, zones[0], zone_traces(c, day, zones)[0], c.reward);
  CHECK(env.reset().outdoor_temp_c == 30.0);
  EnergyModelParams p = c.energy;
  for (double outdoor : {30.0, 32.0, 28.0, 26.0}) {
    p.ambient_temp_c = outdoor;
    const auto r = env.step(16);
    CHECK(r.reward.energy_kwh == doctest::Approx(energy_usage_kwh(p, zones[0], 3.0, 25.0)));
  }
}

TEST_CASE("trace CSV row") {
  TraceRow row{"d1", "mall", TimeOfDay::from_hm(10, 0), 25.0, 25.0, 3, {1, 0, 2}, 3.0, 8.5, -1.25};
  CHECK(trace_csv_header() ==
        "day_id,zone,time,action_c,indoor_c,occupancy,votes_inc,votes_dec,votes_const,comfort,energy_kwh,reward\n");
  CHECK(trace_csv_row(row) == "d1,mall,10:00,25,25,3,1,0,2,3,8.5,-1.25\n");
}
