#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ucn/coverage.hpp"
#include "ucn/config.hpp"
#include "ucn/mlp.hpp"
#include "ucn/world.hpp"

namespace ucn::test {

/// Independent re-implementation of the deterministic greedy service rule:
/// users in index order, nearest covering UAV with capacity, ties by id.
/// Written against the rule statement, not the production code path.
inline int served_oracle(const std::vector<Vec2>& users,
                         const std::vector<ServingUav>& uavs,
                         const CoverageModel& model) {
  struct Cand {
    double dist;
    int id;
    std::size_t idx;
  };
  std::vector<int> cap(uavs.size(), model.capacity);
  int total = 0;
  for (const Vec2& user : users) {
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < uavs.size(); ++i) {
      double r = uavs[i].altitude * std::tan(model.aperture_rad / 2.0);
      double d = std::hypot(user.x - uavs[i].ground.x, user.y - uavs[i].ground.y);
      if (d <= r) cands.push_back({d, uavs[i].id, i});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.id < b.id;
    });
    for (const Cand& c : cands) {
      if (cap[c.idx] > 0) {
        --cap[c.idx];
        ++total;
        break;
      }
    }
  }
  return total;
}

/// Lens area by 1D strip integration along x (independent of the closed
/// form): integrates the length of the y-interval intersection.
inline double overlap_area_quadrature(const Vec2& p1, double r1, const Vec2& p2,
                                      double r2, int strips = 200000) {
  double lo = std::max(p1.x - r1, p2.x - r2);
  double hi = std::min(p1.x + r1, p2.x + r2);
  if (lo >= hi) return 0.0;
  double dx = (hi - lo) / strips;
  double area = 0.0;
  for (int i = 0; i < strips; ++i) {
    double x = lo + (i + 0.5) * dx;
    double q1 = r1 * r1 - (x - p1.x) * (x - p1.x);
    double q2 = r2 * r2 - (x - p2.x) * (x - p2.x);
    if (q1 <= 0.0 || q2 <= 0.0) continue;
    double h1 = std::sqrt(q1), h2 = std::sqrt(q2);
    double ylo = std::max(p1.y - h1, p2.y - h2);
    double yhi = std::min(p1.y + h1, p2.y + h2);
    if (yhi > ylo) area += (yhi - ylo) * dx;
  }
  return area;
}

/// Central finite differences of scalar(params) w.r.t. every parameter.
inline std::vector<double> finite_difference_grad(
    Mlp& net, const std::function<double()>& scalar, double eps = 1e-4) {
  auto params = net.params();
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double orig = params[i];
    params[i] = orig + eps;
    double up = scalar();
    params[i] = orig - eps;
    double down = scalar();
    params[i] = orig;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|)
inline double max_relative_error(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double denom = std::max({1.0, std::fabs(a[i]), std::fabs(b[i])});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

/// Best mean served count over an exhaustive grid of static single-UAV
/// placements, evaluated on the scenario's per-slot user samples.
inline double grid_placement_oracle(const ExperimentConfig& cfg, uint64_t seed,
                                    int grid = 20) {
  WorldState w = init_world(cfg.scenario, seed);
  std::vector<std::vector<Vec2>> user_sets;
  for (int t = 0; t < cfg.scenario.slots; ++t) {
    w.clock.slot_index = t;
    user_sets.push_back(sample_users(w));
  }
  double best = 0.0;
  for (int gx = 0; gx < grid; ++gx) {
    for (int gy = 0; gy < grid; ++gy) {
      Vec2 pos{(gx + 0.5) * cfg.scenario.region.width / grid,
               (gy + 0.5) * cfg.scenario.region.height / grid};
      std::vector<ServingUav> uav{{0, pos, cfg.scenario.h_serve}};
      double acc = 0.0;
      for (const auto& users : user_sets)
        acc += count_served(users, uav, cfg.scenario.coverage).total;
      best = std::max(best, acc / static_cast<double>(user_sets.size()));
    }
  }
  return best;
}

}  // namespace ucn::test
