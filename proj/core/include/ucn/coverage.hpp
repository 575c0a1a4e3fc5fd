#pragma once

#include <vector>

#include "ucn/geometry.hpp"

namespace ucn {

struct CoverageModel {
  double aperture_rad = M_PI / 2.0;  // full aperture angle, (0, pi)
  int capacity = 20;                 // users per UAV
};

/// Ground footprint radius at altitude h: r = h * tan(aperture/2).
/// Throws std::domain_error for h <= 0.
double footprint_radius(double h, const CoverageModel& model);

/// A serving UAV as seen by the coverage computation.
struct ServingUav {
  int id = 0;
  Vec2 ground;        // (x, y)
  double altitude = 0.0;
};

struct ServedResult {
  int total = 0;
  std::vector<int> per_uav;     // indexed like `uavs`
  std::vector<int> assignment;  // per user: index into `uavs`, or -1
};

/// Greedy deterministic assignment: users in ascending index order, each to
/// the nearest covering UAV with remaining capacity, ties by lower UAV id.
ServedResult count_served(const std::vector<Vec2>& users,
                          const std::vector<ServingUav>& uavs,
                          const CoverageModel& model);

/// Exact lens area of two discs; the smaller disc's area on containment.
double overlap_area(const Vec2& p1, double r1, const Vec2& p2, double r2);

}  // namespace ucn
