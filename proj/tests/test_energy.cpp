#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ucn/energy.hpp"
#include "ucn/rng.hpp"
#include "ucn/world.hpp"

using namespace ucn;

TEST_CASE("attenuation calibration: one tenth after 300 m") {
  EnergyModel m;
  CHECK(std::fabs(std::exp(-m.attenuation_k * 300.0) - 0.1) < 1e-9);
}

TEST_CASE("solar intensity examples") {
  EnergyModel m;
  // depth 0: the raw day curve
  CHECK(solar_intensity(12.0, 0.0, m) == doctest::Approx(m.base_intensity(12.0)));
  CHECK(m.base_intensity(12.0) == doctest::Approx(1.0));
  // 300 m below the cloud top: ~1/10
  CHECK(solar_intensity(12.0, 300.0, m) == doctest::Approx(0.1).epsilon(1e-9));
  // night: zero at any depth
  CHECK(solar_intensity(0.0, 0.0, m) == doctest::Approx(0.0));
  CHECK(solar_intensity(3.0, 500.0, m) == doctest::Approx(0.0));
}

TEST_CASE("solar intensity is monotone in depth") {
  EnergyModel m;
  auto rng = make_rng(31);
  std::uniform_real_distribution<double> hour(0.0, 24.0);
  std::uniform_real_distribution<double> depth(0.0, 2000.0);
  for (int i = 0; i < 10000; ++i) {
    double h = hour(rng);
    double d1 = depth(rng), d2 = depth(rng);
    if (d1 > d2) std::swap(d1, d2);
    CHECK(solar_intensity(h, d1, m) >= solar_intensity(h, d2, m));
  }
}

TEST_CASE("intensity table override") {
  EnergyModel m;
  std::array<double, 24> table{};
  table[5] = 0.7;
  m.intensity_table = table;
  CHECK(m.base_intensity(5.4) == doctest::Approx(0.7));
  CHECK(m.base_intensity(6.0) == doctest::Approx(0.0));
}

TEST_CASE("step_battery per status") {
  EnergyModel m;
  m.hover_cost = 1.0;
  m.serve_cost = 0.5;
  Uav u;
  u.battery = 100.0;

  u.status = UavStatus::Serving;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(98.5));
  CHECK(step_battery(u, 100.0, m, 12.0) == doctest::Approx(97.5));

  u.status = UavStatus::Idle;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(99.5));

  u.status = UavStatus::Away;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(100.0));

  u.status = UavStatus::Charging;
  m.pv_rate = 6.0;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(106.0));

  u.battery = m.b_max;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(m.b_max));  // saturates

  u.battery = 0.3;
  u.status = UavStatus::Serving;
  CHECK(step_battery(u, 0.0, m, 12.0) == doctest::Approx(0.0));  // floor
}

TEST_CASE("energy_to_charge") {
  EnergyModel m;
  m.cloud_top = 2000.0;
  m.climb_cost = 0.2;
  CHECK(energy_to_charge(2000.0, m) == doctest::Approx(0.0));
  CHECK(energy_to_charge(2500.0, m) == doctest::Approx(0.0));
  CHECK(energy_to_charge(0.0, m) == doctest::Approx(400.0));
  m.climb_cost = 0.1;
  m.cloud_top = 2100.0;
  CHECK(energy_to_charge(100.0, m) == doctest::Approx(200.0));
}

TEST_CASE("is_sustainable boundary is inclusive") {
  EnergyModel m;
  m.cloud_top = 2000.0;
  m.climb_cost = 0.1;
  m.reserve_frac = 0.0;
  Uav u;
  u.position.z = 0.0;
  u.battery = 200.0;  // exactly the climb energy
  CHECK(is_sustainable(u, m));
  u.battery = 0.0;
  CHECK_FALSE(is_sustainable(u, m));

  m.reserve_frac = 50.0 / m.b_max;  // climb from ground 200, reserve 50
  u.battery = 500.0;
  CHECK(is_sustainable(u, m));
  u.battery = 249.0;
  CHECK_FALSE(is_sustainable(u, m));
}

TEST_CASE("property: battery stays within [0, b_max] and drains monotonically") {
  EnergyModel m;
  auto rng = make_rng(17);
  std::uniform_real_distribution<double> batt(0.0, m.b_max);
  std::uniform_real_distribution<double> moved(0.0, 80.0);
  std::uniform_real_distribution<double> hour(0.0, 24.0);
  std::uniform_int_distribution<int> status(0, 3);
  for (int i = 0; i < 5000; ++i) {
    Uav u;
    u.battery = batt(rng);
    u.status = static_cast<UavStatus>(status(rng));
    double b2 = step_battery(u, moved(rng), m, hour(rng));
    CHECK(b2 >= 0.0);
    CHECK(b2 <= m.b_max);
    if (u.status == UavStatus::Charging) CHECK(b2 >= u.battery - 1e-12);
    if (u.status == UavStatus::Serving) CHECK(b2 <= u.battery + 1e-12);
  }
}
