#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "ucn/coverage.hpp"
#include "ucn/rng.hpp"

using namespace ucn;

TEST_CASE("footprint radius") {
  CoverageModel m;
  m.aperture_rad = M_PI / 2.0;
  CHECK(footprint_radius(100.0, m) == doctest::Approx(100.0));

  m.aperture_rad = M_PI / 3.0;  // 60 degrees
  CHECK(footprint_radius(100.0, m) ==
        doctest::Approx(100.0 * std::tan(M_PI / 6.0)).epsilon(1e-12));

  m.aperture_rad = M_PI / 2.0;
  CHECK(footprint_radius(1e-9, m) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK_THROWS_AS(footprint_radius(0.0, m), std::domain_error);
  CHECK_THROWS_AS(footprint_radius(-5.0, m), std::domain_error);
}

TEST_CASE("count_served basics") {
  CoverageModel m;
  m.aperture_rad = M_PI / 2.0;
  std::vector<ServingUav> one{{0, {500, 500}, 100.0}};  // radius 100
  std::vector<Vec2> users{{490, 500}, {510, 510}, {530, 470}};

  m.capacity = 5;
  ServedResult r = count_served(users, one, m);
  CHECK(r.total == 3);
  CHECK(r.per_uav[0] == 3);

  m.capacity = 2;
  r = count_served(users, one, m);
  CHECK(r.total == 2);
  CHECK(r.assignment[2] == -1);  // third user arrives after capacity binds
}

TEST_CASE("count_served matches the independent oracle on random instances") {
  auto rng = make_rng(20240811);
  std::uniform_int_distribution<int> n_users(0, 20);
  std::uniform_int_distribution<int> n_uavs(1, 4);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::uniform_real_distribution<double> alt(40.0, 160.0);
  std::uniform_int_distribution<int> cap(1, 6);

  for (int it = 0; it < 1000; ++it) {
    CoverageModel m;
    m.aperture_rad = M_PI / 2.0;
    m.capacity = cap(rng);
    std::vector<Vec2> users(static_cast<std::size_t>(n_users(rng)));
    for (Vec2& u : users) u = {coord(rng), coord(rng)};
    std::vector<ServingUav> uavs(static_cast<std::size_t>(n_uavs(rng)));
    for (std::size_t i = 0; i < uavs.size(); ++i)
      uavs[i] = {static_cast<int>(i), {coord(rng), coord(rng)}, alt(rng)};
    ServedResult got = count_served(users, uavs, m);
    int want = ucn::test::served_oracle(users, uavs, m);
    REQUIRE(got.total == want);
  }
}

TEST_CASE("property: appending a UAV never reduces the served total") {
  auto rng = make_rng(99);
  std::uniform_int_distribution<int> n_users(1, 25);
  std::uniform_real_distribution<double> coord(0.0, 600.0);
  for (int it = 0; it < 400; ++it) {
    CoverageModel m;
    m.aperture_rad = M_PI / 2.0;
    m.capacity = 3;
    std::vector<Vec2> users(static_cast<std::size_t>(n_users(rng)));
    for (Vec2& u : users) u = {coord(rng), coord(rng)};
    std::vector<ServingUav> uavs{{0, {coord(rng), coord(rng)}, 80.0},
                                 {1, {coord(rng), coord(rng)}, 80.0}};
    int before = count_served(users, uavs, m).total;
    uavs.push_back({2, {coord(rng), coord(rng)}, 80.0});
    int after = count_served(users, uavs, m).total;
    CHECK(after >= before);
  }
}

TEST_CASE("property: served total bounded by users and capacity") {
  auto rng = make_rng(123);
  std::uniform_int_distribution<int> n_users(0, 30);
  std::uniform_real_distribution<double> coord(0.0, 500.0);
  for (int it = 0; it < 200; ++it) {
    CoverageModel m;
    m.aperture_rad = M_PI / 2.0;
    m.capacity = 4;
    std::vector<Vec2> users(static_cast<std::size_t>(n_users(rng)));
    for (Vec2& u : users) u = {coord(rng), coord(rng)};
    std::vector<ServingUav> uavs{{0, {coord(rng), coord(rng)}, 90.0},
                                 {1, {coord(rng), coord(rng)}, 90.0},
                                 {2, {coord(rng), coord(rng)}, 90.0}};
    int total = count_served(users, uavs, m).total;
    CHECK(total <= static_cast<int>(users.size()));
    CHECK(total <= m.capacity * static_cast<int>(uavs.size()));
  }
}

TEST_CASE("overlap area: disjoint, identical, half-spaced") {
  Vec2 a{0, 0};
  CHECK(overlap_area(a, 50, {120, 0}, 50) == doctest::Approx(0.0));
  CHECK(overlap_area(a, 50, {100, 0}, 50) == doctest::Approx(0.0));
  CHECK(overlap_area(a, 50, {0, 0}, 50) == doctest::Approx(M_PI * 2500.0));

  // equal radii at distance d: 2 r^2 acos(d/2r) - (d/2) sqrt(4r^2 - d^2)
  double r = 50.0, d = 50.0;
  double expect = 2.0 * r * r * std::acos(d / (2.0 * r)) -
                  (d / 2.0) * std::sqrt(4.0 * r * r - d * d);
  CHECK(overlap_area(a, r, {d, 0}, r) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(3070.9242).epsilon(1e-4));
}

TEST_CASE("overlap area: containment returns the smaller disc") {
  CHECK(overlap_area({0, 0}, 100, {10, 0}, 20) == doctest::Approx(M_PI * 400.0));
}

TEST_CASE("overlap area matches strip quadrature on random pairs") {
  auto rng = make_rng(4242);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  std::uniform_real_distribution<double> rad(5.0, 120.0);
  for (int it = 0; it < 25; ++it) {
    Vec2 p1{coord(rng), coord(rng)}, p2{coord(rng), coord(rng)};
    double r1 = rad(rng), r2 = rad(rng);
    double got = overlap_area(p1, r1, p2, r2);
    double want = ucn::test::overlap_area_quadrature(p1, r1, p2, r2);
    CHECK(got == doctest::Approx(want).epsilon(1e-4));
  }
}

TEST_CASE("property: overlap is symmetric and bounded") {
  auto rng = make_rng(7);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> rad(0.0, 80.0);
  for (int it = 0; it < 500; ++it) {
    Vec2 p1{coord(rng), coord(rng)}, p2{coord(rng), coord(rng)};
    double r1 = rad(rng), r2 = rad(rng);
    double ab = overlap_area(p1, r1, p2, r2);
    double ba = overlap_area(p2, r2, p1, r1);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    double rmin = std::min(r1, r2);
    CHECK(ab <= M_PI * rmin * rmin + 1e-9);
    CHECK(ab >= 0.0);
  }
}
