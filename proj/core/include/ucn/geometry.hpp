#pragma once

#include <algorithm>
#include <cmath>

namespace ucn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const = default;

  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3& o) const = default;

  Vec2 ground() const { return {x, y}; }
};

/// Rectangular service region anchored at the origin.
struct Region {
  double width = 1000.0;
  double height = 1000.0;

  bool contains(const Vec2& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }

  Vec2 clamp(const Vec2& p) const {
    return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
  }

  Vec2 center() const { return {width / 2.0, height / 2.0}; }
};

}  // namespace ucn
