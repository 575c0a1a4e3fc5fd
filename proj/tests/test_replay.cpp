#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "support/stats.hpp"
#include "ucn/replay.hpp"
#include "ucn/rng.hpp"

using namespace ucn;

namespace {
Transition tr(double reward) {
  return {{reward}, {0.0}, reward, {reward}, false};
}
}  // namespace

TEST_CASE("FIFO eviction beyond capacity") {
  ReplayBuffer<Transition> buf(2);
  buf.push(tr(1));
  buf.push(tr(2));
  buf.push(tr(3));
  CHECK(buf.size() == 2);
  auto items = buf.snapshot();
  REQUIRE(items.size() == 2);
  CHECK(items[0].reward == doctest::Approx(2));
  CHECK(items[1].reward == doctest::Approx(3));
  CHECK(buf.total_pushed() == 3);
}

TEST_CASE("sampling needs at least batch items") {
  ReplayBuffer<Transition> buf(10);
  auto rng = make_rng(1);
  CHECK_FALSE(buf.sample(2, rng).has_value());
  buf.push(tr(1));
  CHECK_FALSE(buf.sample(2, rng).has_value());
  buf.push(tr(2));
  CHECK(buf.sample(2, rng).has_value());
}

TEST_CASE("sampling is deterministic given rng state") {
  ReplayBuffer<Transition> buf(16);
  for (int i = 0; i < 10; ++i) buf.push(tr(i));
  auto rng1 = make_rng(42);
  auto rng2 = make_rng(42);
  auto a = buf.sample(6, rng1);
  auto b = buf.sample(6, rng2);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  for (std::size_t i = 0; i < a->size(); ++i)
    CHECK((*a)[i].reward == (*b)[i].reward);
}

TEST_CASE("uniform sampling: per-item frequency within 4 sigma") {
  ReplayBuffer<Transition> buf(4);
  for (int i = 0; i < 4; ++i) buf.push(tr(i));
  auto rng = make_rng(99);
  std::array<long, 4> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws / 4; ++i) {
    auto batch = buf.sample(4, rng);
    REQUIRE(batch.has_value());
    for (const Transition& t : *batch)
      ++counts[static_cast<std::size_t>(t.reward)];
  }
  double expected = draws / 4.0;
  double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (long c : counts) CHECK(std::fabs(c - expected) <= 4.0 * sigma);
}

TEST_CASE("concurrent producers preserve count and capacity bounds") {
  ReplayBuffer<Transition> buf(1000);
  std::vector<std::thread> producers;
  for (int w = 0; w < 4; ++w)
    producers.emplace_back([&buf, w] {
      for (int i = 0; i < 500; ++i) buf.push(tr(w * 1000 + i));
    });
  auto rng = make_rng(5);
  for (int i = 0; i < 50; ++i) (void)buf.sample(8, rng);
  for (auto& t : producers) t.join();
  CHECK(buf.total_pushed() == 2000);
  CHECK(buf.size() == 1000);
}
