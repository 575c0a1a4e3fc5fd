#include "ucn/coverage.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ucn {

double footprint_radius(double h, const CoverageModel& model) {
  if (h <= 0.0) throw std::domain_error("footprint_radius: altitude must be > 0");
  return h * std::tan(model.aperture_rad / 2.0);
}

ServedResult count_served(const std::vector<Vec2>& users,
                          const std::vector<ServingUav>& uavs,
                          const CoverageModel& model) {
  ServedResult res;
  res.per_uav.assign(uavs.size(), 0);
  res.assignment.assign(users.size(), -1);

  std::vector<double> radius(uavs.size());
  std::vector<int> remaining(uavs.size(), model.capacity);
  for (std::size_t i = 0; i < uavs.size(); ++i)
    radius[i] = footprint_radius(uavs[i].altitude, model);

  for (std::size_t u = 0; u < users.size(); ++u) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < uavs.size(); ++i) {
      if (remaining[i] <= 0) continue;
      double d = (users[u] - uavs[i].ground).norm();
      if (d > radius[i]) continue;
      // nearest covering UAV; ties go to the lower id
      if (d < best_dist ||
          (d == best_dist && best >= 0 && uavs[i].id < uavs[static_cast<std::size_t>(best)].id)) {
        best = static_cast<int>(i);
        best_dist = d;
      }
    }
    if (best >= 0) {
      res.assignment[u] = best;
      --remaining[static_cast<std::size_t>(best)];
      ++res.per_uav[static_cast<std::size_t>(best)];
      ++res.total;
    }
  }
  return res;
}

double overlap_area(const Vec2& p1, double r1, const Vec2& p2, double r2) {
  if (r1 < 0.0 || r2 < 0.0) throw std::domain_error("overlap_area: negative radius");
  double d = (p1 - p2).norm();
  if (d >= r1 + r2) return 0.0;
  double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return M_PI * rmin * rmin;
  double a1 = r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
  double a2 = r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
  double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return a1 + a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

}  // namespace ucn
