#include <cmath>
#include <string>

#include "doctest.h"
#include "malltwin/config.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"
#include "malltwin/time_of_day.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace malltwin;
using malltwin::testing::shipped_config;
using malltwin::testing::small_config;
using nlohmann::json;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  } catch (const ParseError& e) {
    return std::string("parse: ") + e.what();
  }
  return "";
}

json minimal_json() {
  return json::parse(R"({
    "schema_version": 1,
    "mall": {"stores": [{"name": "Shop", "area_m2": 100, "description": "a shop"}]},
    "groups": [{"name": "G", "description": "a group", "thermal_preference": "mild",
                "comfort_low_c": 22, "comfort_high_c": 26}]
  })");
}

}  // namespace

TEST_CASE("time of day parses and prints") {
  CHECK(TimeOfDay::parse("10:00").minutes() == 600);
  CHECK(TimeOfDay::parse("9:05").str() == "09:05");
  CHECK(TimeOfDay::parse("19:30") - TimeOfDay::parse("10:00") == 570);
  CHECK_THROWS_AS(TimeOfDay::parse("25:00"), ConfigError);
  CHECK_THROWS_AS(TimeOfDay::parse("10:60"), ConfigError);
  CHECK_THROWS_AS(TimeOfDay::parse("ten"), ConfigError);
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(25.0) == "25");
  CHECK(format_number(25.5) == "25.5");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-3.0) == "-3");
}

TEST_CASE("shipped config loads with documented geometry") {
  const auto c = shipped_config();
  CHECK(c.mall.total_area_m2 == 4890.0);
  CHECK(c.mall.ceiling_height_m == 3.0);
  CHECK(c.mall.open_time.str() == "10:00");
  CHECK(c.mall.close_time.str() == "20:00");
  CHECK(c.mall.checkpoint_minutes == 30);
  CHECK(c.reward.w_c == doctest::Approx(2.2));
  CHECK(c.reward.w_e == doctest::Approx(1.0 / 220.0));
  CHECK(c.rl.batch_size == 128);
  CHECK(c.rl.learning_rate == 1e-4);
  CHECK(c.rl.gamma == 0.99);
  CHECK(c.rl.eps_init == 0.9);
  CHECK(c.rl.eps_final == 0.05);
  CHECK(c.rl.eps_decay == 2000.0);
  CHECK(c.rl.tau == 5e-3);
  double area = 0.0;
  for (const auto& s : c.mall.stores) {
    area += s.area_m2;
    CHECK_FALSE(s.description.empty());
  }
  CHECK(area <= c.mall.total_area_m2);
  for (const auto& g : c.groups) CHECK_FALSE(g.description.empty());
}

TEST_CASE("checkpoints cover the opening interval") {
  auto mall = small_config().mall;
  mall.open_time = TimeOfDay::from_hm(10, 0);
  mall.close_time = TimeOfDay::from_hm(20, 0);
  const auto cps = checkpoints(mall);
  REQUIRE(cps.size() == 20);
  CHECK(cps.front().str() == "10:00");
  CHECK(cps.back().str() == "19:30");
  for (std::size_t i = 1; i < cps.size(); ++i) CHECK(cps[i] - cps[i - 1] == 30);

  mall.close_time = TimeOfDay::from_hm(11, 0);
  CHECK(checkpoints(mall).size() == 2);
  mall.close_time = TimeOfDay::from_hm(10, 30);
  CHECK(checkpoints(mall) == std::vector<TimeOfDay>{TimeOfDay::from_hm(10, 0)});
}

TEST_CASE("checkpoint count equals interval over step for many layouts") {
  auto mall = small_config().mall;
  for (int step : {5, 10, 15, 20, 30, 60}) {
    for (int hours = 1; hours <= 14; ++hours) {
      mall.checkpoint_minutes = step;
      mall.open_time = TimeOfDay::from_hm(8, 0);
      mall.close_time = TimeOfDay::from_hm(8 + hours, 0);
      CHECK(checkpoints(mall).size() == static_cast<std::size_t>(hours * 60 / step));
    }
  }
}

TEST_CASE("omitted optional fields take defaults") {
  const auto c = parse_config(minimal_json().dump());
  CHECK(c.energy.eer == 3.0);
  CHECK(c.energy.ambient_temp_c == 30.0);
  CHECK(c.energy.air_density_kg_per_m3 == 1.275);
  CHECK(c.energy.heat_capacity_j_per_kg_k == 1000.0);
  CHECK(c.mall.total_area_m2 == 4890.0);
  CHECK(c.rl.hidden_layers == std::vector<int>{128, 128});
  CHECK(c.observation.layout == StateLayout::GroupTotals);
}

TEST_CASE("validation errors name the offending field") {
  auto j = minimal_json();
  j["groups"][0]["comfort_low_c"] = 26;
  j["groups"][0]["comfort_high_c"] = 22;
  CHECK(error_of(j.dump()).find("comfort") != std::string::npos);

  j = minimal_json();
  j["mall"]["stores"][0]["area_m2"] = 5000;
  CHECK(error_of(j.dump()).find("area") != std::string::npos);

  j = minimal_json();
  j["mall"]["stores"].push_back(j["mall"]["stores"][0]);
  CHECK(error_of(j.dump()).find("duplicate") != std::string::npos);

  j = minimal_json();
  j["mall"]["stores"][0]["description"] = "";
  CHECK(error_of(j.dump()).find("description") != std::string::npos);

  j = minimal_json();
  j["mall"]["checkpoint_minutes"] = 45;
  CHECK(error_of(j.dump()).find("checkpoint_minutes") != std::string::npos);

  j = minimal_json();
  j["energy"] = {{"eer", -1}};
  CHECK(error_of(j.dump()).find("energy.eer") != std::string::npos);

  j = minimal_json();
  j["reward"] = {{"w_c", 0}, {"w_e", 0}};
  CHECK(error_of(j.dump()).find("reward") != std::string::npos);

  j = minimal_json();
  j["rl"] = {{"gamma", 1.0}};
  CHECK(error_of(j.dump()).find("rl.gamma") != std::string::npos);

  j = minimal_json();
  j["rl"] = {{"tau", 0.0}};
  CHECK(error_of(j.dump()).find("rl.tau") != std::string::npos);

  j = minimal_json();
  j["groups"][0].erase("description");
  CHECK(error_of(j.dump()).find("groups[0].description") != std::string::npos);

  j = minimal_json();
  j["schema_version"] = 99;
  CHECK(error_of(j.dump()).find("schema_version") != std::string::npos);

  CHECK(error_of("{ not json").rfind("parse:", 0) == 0);
}

TEST_CASE("config round-trips through JSON") {
  const auto c = shipped_config();
  CHECK(parse_config(config_to_json(c)) == c);

  auto s = small_config();
  s.energy.outdoor_temp_c_by_checkpoint = {30, 31, 32, 33};
  s.rl.reward_scale = 0.25;
  s.observation.layout = StateLayout::GroupByStore;
  s.reward.energy_units_per_kwh = 1.0;
  const auto back = parse_config(config_to_json(s));
  CHECK(back == s);
  CHECK(config_to_json(back) == config_to_json(s));
}

TEST_CASE("config saves atomically and reloads") {
  malltwin::testing::TempDir dir("config");
  const auto path = dir.path / "c.json";
  save_config(small_config(), path);
  CHECK(load_config(path) == small_config());
  CHECK_THROWS_AS(load_config(dir.path / "missing.json"), ConfigError);
}
