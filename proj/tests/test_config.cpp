#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ucn/config.hpp"
#include "ucn/errors.hpp"

using namespace ucn;

TEST_CASE("defaults parse from an empty config") {
  ExperimentConfig cfg = parse_config("", "empty");
  CHECK(cfg.scenario.n_max == 5);
  CHECK(cfg.scenario.slots == 100);
  CHECK(cfg.scenario.region.width == doctest::Approx(1000.0));
  CHECK(cfg.scenario.users.clusters.size() == 1);  // default cluster
  CHECK(cfg.ddpg.actor_lr == doctest::Approx(1e-4));
  CHECK(cfg.dqn.lr == doctest::Approx(5e-4));
  CHECK(cfg.sched.hours == 24);
}

TEST_CASE("values, sections and table arrays parse") {
  const char* text = R"(
# scenario
[region]
width = 800
height = 600.0

[crew]
n_max = 3
d_max = 20.5

[users]
total = 42

[[cluster]]
x = 100
y = 200
std = 50
weight = 0.25

[[cluster]]
x = 700
y = 400
vx = -1.5
std = 60
weight = 0.75

[[event]]
kind = "quit"
uav = 1
slot = 10

[run]
seed = 99
out = "runs/demo"
)";
  ExperimentConfig cfg = parse_config(text, "t");
  CHECK(cfg.scenario.region.width == doctest::Approx(800));
  CHECK(cfg.scenario.region.height == doctest::Approx(600));
  CHECK(cfg.scenario.n_max == 3);
  CHECK(cfg.scenario.d_max == doctest::Approx(20.5));
  CHECK(cfg.scenario.users.total_users == 42);
  REQUIRE(cfg.scenario.users.clusters.size() == 2);
  CHECK(cfg.scenario.users.clusters[1].velocity.x == doctest::Approx(-1.5));
  REQUIRE(cfg.scenario.events.size() == 1);
  CHECK(cfg.scenario.events[0].uav_id == 1);
  CHECK(cfg.run.seed == 99);
  CHECK(cfg.run.out_dir == "runs/demo");
}

TEST_CASE("unknown key is rejected with the line number") {
  const char* text = "[energy]\nb_max = 10\nbogus_key = 3\n";
  try {
    parse_config(text, "bad.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bogus_key") != std::string::npos);
    CHECK(msg.find("bad.toml:3") != std::string::npos);
  }
}

TEST_CASE("unknown section is rejected") {
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n", "t"), ConfigError);
}

TEST_CASE("invalid scenarios fail validation") {
  CHECK_THROWS_AS(parse_config("[region]\nwidth = -5\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_config("[crew]\nn_max = 0\n", "t"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("[[cluster]]\nx = 1\ny = 1\nstd = 0\nweight = 1\n", "t"),
      ConfigError);
  // weights must sum to 1
  CHECK_THROWS_AS(
      parse_config("[[cluster]]\nx = 1\ny = 1\nstd = 5\nweight = 0.4\n", "t"),
      ConfigError);
}

TEST_CASE("demand array must hold 24 values") {
  CHECK_THROWS_AS(parse_config("[users]\ndemand = [0.5, 0.5]\n", "t"), ConfigError);
}

TEST_CASE("multi-line arrays parse") {
  std::string text = "[users]\ndemand = [0.5, 0.5, 0.5, 0.5,\n 0.5, 0.5, 0.5, 0.5,\n"
                     " 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5,\n"
                     " 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]\n";
  ExperimentConfig cfg = parse_config(text, "t");
  CHECK(cfg.scenario.users.demand[23] == doctest::Approx(0.5));
}

TEST_CASE("overrides apply after the file") {
  ExperimentConfig cfg = parse_config("[energy]\npv_rate = 10\n", "t");
  apply_overrides(cfg, {"energy.pv_rate=80", "run.episodes=7"});
  CHECK(cfg.scenario.energy.pv_rate == doctest::Approx(80));
  CHECK(cfg.run.episodes == 7);
  CHECK_THROWS_AS(apply_overrides(cfg, {"energy.nope=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"no_dot"}), ConfigError);
}

TEST_CASE("serialize -> parse round-trips the resolved config") {
  ExperimentConfig cfg = parse_config(
      "[crew]\nn_max = 4\n[[cluster]]\nx = 10\ny = 20\nstd = 30\nweight = 1.0\n"
      "[scheduler]\ncoeff = 0.125\n",
      "t");
  std::string echo = serialize_config(cfg);
  ExperimentConfig back = parse_config(echo, "echo");
  CHECK(serialize_config(back) == echo);
  CHECK(config_hash(back) == config_hash(cfg));
}
