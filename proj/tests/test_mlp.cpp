#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "ucn/mlp.hpp"
#include "ucn/rng.hpp"

using namespace ucn;

TEST_CASE("forward: zero net maps everything to zero") {
  Mlp net({3, 4, 2}, OutputActivation::Identity);
  std::vector<double> y = net.forward(std::vector<double>{1.0, -2.0, 3.0});
  CHECK(y == std::vector<double>{0.0, 0.0});
}

TEST_CASE("forward: identity-configured single layer") {
  Mlp net({2, 2}, OutputActivation::Identity);
  auto p = net.params();
  // weights row-major: [1 0; 0 1], biases 0
  p[0] = 1.0;
  p[3] = 1.0;
  std::vector<double> x{0.7, -1.3};
  CHECK(net.forward(x) == x);
}

TEST_CASE("forward matches a hand-computed pass") {
  // 2-2-1 with ReLU hidden, identity out
  Mlp net({2, 2, 1}, OutputActivation::Identity);
  auto p = net.params();
  // layer 0: W = [0.5 -1.0; 2.0 0.25], b = (0.1, -0.2)
  p[0] = 0.5; p[1] = -1.0; p[2] = 2.0; p[3] = 0.25; p[4] = 0.1; p[5] = -0.2;
  // layer 1: W = [1.5 -0.5], b = 0.3
  p[6] = 1.5; p[7] = -0.5; p[8] = 0.3;
  std::vector<double> x{1.0, 2.0};
  // pre1 = (0.5*1 - 1.0*2 + 0.1, 2.0*1 + 0.25*2 - 0.2) = (-1.4, 2.3)
  // act1 = (0, 2.3); out = 1.5*0 - 0.5*2.3 + 0.3 = -0.85
  double want = 1.5 * 0.0 - 0.5 * 2.3 + 0.3;
  CHECK(net.forward(x)[0] == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("forward rejects dimension mismatch") {
  Mlp net({3, 2}, OutputActivation::Identity);
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("backward: linear net gradient d(wx)/dw = x") {
  Mlp net({1, 1}, OutputActivation::Identity);
  net.params()[0] = 3.0;
  Mlp::Tape tape;
  std::vector<double> x{2.5};
  net.forward(x, tape);
  std::vector<double> grad(net.param_count(), 0.0);
  net.backward(tape, std::vector<double>{1.0}, grad);
  CHECK(grad[0] == doctest::Approx(2.5));  // dw
  CHECK(grad[1] == doctest::Approx(1.0));  // db
}

TEST_CASE("backward: zero upstream gives zero gradients") {
  Mlp net({3, 8, 2}, OutputActivation::Tanh);
  net.init_uniform_fanin(5);
  Mlp::Tape tape;
  std::vector<double> x{0.2, -0.4, 0.9};
  net.forward(x, tape);
  std::vector<double> grad(net.param_count(), 0.0);
  net.backward(tape, std::vector<double>{0.0, 0.0}, grad);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("backward matches central finite differences") {
  auto rng = make_rng(2024);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  for (int arch = 0; arch < 2; ++arch) {
    OutputActivation act = arch ? OutputActivation::Tanh : OutputActivation::Identity;
    Mlp net({4, 8, 8, 3}, act);
    net.init_uniform_fanin(100 + static_cast<uint64_t>(arch));
    std::vector<double> x(4), upstream(3);
    for (double& v : x) v = ux(rng);
    for (double& v : upstream) v = ux(rng);

    Mlp::Tape tape;
    net.forward(x, tape);
    std::vector<double> analytic(net.param_count(), 0.0);
    net.backward(tape, upstream, analytic);

    auto scalar = [&] {
      std::vector<double> y = net.forward(x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
      return s;
    };
    std::vector<double> fd = ucn::test::finite_difference_grad(net, scalar);
    CHECK(ucn::test::max_relative_error(analytic, fd) < 1e-4);
  }
}

TEST_CASE("backward input gradients match finite differences") {
  Mlp net({3, 6, 2}, OutputActivation::Tanh);
  net.init_uniform_fanin(9);
  std::vector<double> x{0.3, -0.7, 0.1};
  std::vector<double> upstream{0.4, -1.1};
  Mlp::Tape tape;
  net.forward(x, tape);
  std::vector<double> pgrad(net.param_count(), 0.0), igrad(3, 0.0);
  net.backward(tape, upstream, pgrad, igrad);

  const double eps = 1e-6;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> xp = x, xm = x;
    xp[static_cast<std::size_t>(i)] += eps;
    xm[static_cast<std::size_t>(i)] -= eps;
    auto dot = [&](const std::vector<double>& in) {
      std::vector<double> y = net.forward(in);
      return upstream[0] * y[0] + upstream[1] * y[1];
    };
    double fd = (dot(xp) - dot(xm)) / (2.0 * eps);
    CHECK(igrad[static_cast<std::size_t>(i)] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("adam: zero gradient leaves parameters untouched") {
  Mlp net({2, 2}, OutputActivation::Identity);
  net.init_uniform_fanin(77);
  std::vector<double> before(net.params().begin(), net.params().end());
  Adam opt(net.param_count(), 1e-2);
  std::vector<double> zeros(net.param_count(), 0.0);
  for (int i = 0; i < 5; ++i) opt.step(net.params(), zeros);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(net.params()[i] == doctest::Approx(before[i]));
}

TEST_CASE("adam: a constant gradient moves parameters against its sign") {
  std::vector<double> param{1.0};
  Adam opt(1, 1e-2);
  std::vector<double> grad{0.5};
  for (int i = 0; i < 100; ++i) opt.step(param, grad);
  CHECK(param[0] < 1.0);

  param = {1.0};
  Adam opt2(1, 1e-2);
  grad = {-0.5};
  for (int i = 0; i < 100; ++i) opt2.step(param, grad);
  CHECK(param[0] > 1.0);
}

TEST_CASE("adam single step matches the hand-evaluated update") {
  std::vector<double> param{0.7};
  Adam opt(1, 1e-3);
  std::vector<double> grad{0.2};
  opt.step(param, grad);
  // t=1: m = 0.1*0.2... m=(1-b1)g=0.02, v=(1-b2)g^2=4e-5*... = 1e-3*0.04
  double m = (1.0 - 0.9) * 0.2;
  double v = (1.0 - 0.999) * 0.04;
  double mhat = m / (1.0 - 0.9);
  double vhat = v / (1.0 - 0.999);
  double want = 0.7 - 1e-3 * mhat / (std::sqrt(vhat) + 1e-8);
  CHECK(param[0] == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("soft update endpoints and contraction") {
  Mlp a({2, 3, 1}, OutputActivation::Identity);
  Mlp b({2, 3, 1}, OutputActivation::Identity);
  a.init_uniform_fanin(1);
  b.init_uniform_fanin(2);

  Mlp t = a;
  soft_update(t, b, 1.0);
  for (std::size_t i = 0; i < t.param_count(); ++i)
    CHECK(t.params()[i] == doctest::Approx(b.params()[i]));

  t = a;
  soft_update(t, b, 0.0);
  for (std::size_t i = 0; i < t.param_count(); ++i)
    CHECK(t.params()[i] == doctest::Approx(a.params()[i]));

  // tau = 0.5 on scalars 2 and 4 gives 3
  Mlp s1({1, 1}, OutputActivation::Identity);
  Mlp s2({1, 1}, OutputActivation::Identity);
  s1.params()[0] = 2.0;
  s2.params()[0] = 4.0;
  soft_update(s1, s2, 0.5);
  CHECK(s1.params()[0] == doctest::Approx(3.0));

  // ||t' - o|| = (1 - tau) ||t - o||
  t = a;
  double before = 0.0;
  for (std::size_t i = 0; i < t.param_count(); ++i) {
    double d = t.params()[i] - b.params()[i];
    before += d * d;
  }
  soft_update(t, b, 0.25);
  double after = 0.0;
  for (std::size_t i = 0; i < t.param_count(); ++i) {
    double d = t.params()[i] - b.params()[i];
    after += d * d;
  }
  CHECK(std::sqrt(after) == doctest::Approx(0.75 * std::sqrt(before)).epsilon(1e-12));

  Mlp wrong({2, 4, 1}, OutputActivation::Identity);
  CHECK_THROWS_AS(soft_update(wrong, b, 0.5), std::invalid_argument);
}

TEST_CASE("parameters stay finite through 1e5 optimizer steps") {
  Mlp net({4, 16, 1}, OutputActivation::Identity);
  net.init_uniform_fanin(3);
  Adam opt(net.param_count(), 1e-3);
  auto rng = make_rng(8);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);

  Mlp::Tape tape;
  std::vector<double> grad(net.param_count());
  for (int step = 0; step < 100000; ++step) {
    std::vector<double> x{ux(rng), ux(rng), ux(rng), ux(rng)};
    double target = std::sin(x[0]) - 0.5 * x[1] * x[2] + x[3];
    net.forward(x, tape);
    double err = tape.act.back()[0] - target;
    std::fill(grad.begin(), grad.end(), 0.0);
    double upstream[1] = {2.0 * err};
    net.backward(tape, upstream, grad);
    opt.step(net.params(), grad);
  }
  for (double p : net.params()) CHECK(std::isfinite(p));
}
