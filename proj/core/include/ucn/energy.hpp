#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace ucn {

struct Uav;  // world.hpp

/// Battery, solar and climb constants. All per-slot costs are in Wh per
/// slot of whatever duration the scenario uses; scenarios at hour scale
/// override them accordingly.
struct EnergyModel {
  double b_max = 500.0;        // Wh
  double hover_cost = 4.0;     // Wh/slot while serving
  double serve_cost = 2.0;     // Wh/slot transmit overhead while serving
  double move_cost = 0.01;     // Wh/meter flown
  double idle_cost = 0.5;      // Wh/slot on the ground
  double climb_cost = 0.1;     // Wh/meter of ascent toward the cloud top
  double pv_rate = 60.0;       // Wh/slot at normalized intensity 1
  double cloud_top = 2000.0;   // m, charging altitude
  double attenuation_k = 0.007675283643313486;  // 1/m, exp(-k*300) = 0.1
  double reserve_frac = 0.02;  // sustainability margin as a fraction of b_max

  // Optional per-hour override of the above-cloud intensity curve.
  std::optional<std::array<double, 24>> intensity_table;

  double reserve() const { return reserve_frac * b_max; }

  /// Above-cloud normalized intensity at the given hour of day.
  /// Default: single-hump day curve, sunrise 06:00, noon peak 1, sunset 18:00.
  double base_intensity(double hour) const {
    if (intensity_table) {
      int h = static_cast<int>(std::floor(hour)) % 24;
      if (h < 0) h += 24;
      return (*intensity_table)[static_cast<std::size_t>(h)];
    }
    double h = std::fmod(hour, 24.0);
    if (h < 0) h += 24.0;
    return std::max(0.0, std::sin(M_PI * (h - 6.0) / 12.0));
  }
};

/// Normalized solar intensity at `depth` meters below the cloud top.
double solar_intensity(double hour, double depth_below_cloud_top,
                       const EnergyModel& model);

/// Battery level after one slot, clamped to [0, b_max]. Status semantics:
/// SERVING drains hover+transmit+motion, IDLE drains idle_cost, CHARGING
/// gains pv_rate at the cloud top, AWAY is untouched.
double step_battery(const Uav& uav, double moved_meters,
                    const EnergyModel& model, double hour);

/// Energy needed to climb from `altitude` to the charging altitude.
double energy_to_charge(double altitude, const EnergyModel& model);

/// True when the UAV retains enough battery to climb to the charging
/// altitude plus the reserve margin (boundary inclusive).
bool is_sustainable(const Uav& uav, const EnergyModel& model);

}  // namespace ucn
