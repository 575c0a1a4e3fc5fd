#include "ucn/energy.hpp"

#include <algorithm>

#include "ucn/world.hpp"

namespace ucn {

double solar_intensity(double hour, double depth_below_cloud_top,
                       const EnergyModel& model) {
  double depth = std::max(0.0, depth_below_cloud_top);
  return model.base_intensity(hour) * std::exp(-model.attenuation_k * depth);
}

double step_battery(const Uav& uav, double moved_meters,
                    const EnergyModel& model, double hour) {
  double b = uav.battery;
  switch (uav.status) {
    case UavStatus::Serving:
      b -= model.hover_cost + model.serve_cost + model.move_cost * moved_meters;
      break;
    case UavStatus::Idle:
      b -= model.idle_cost;
      break;
    case UavStatus::Charging:
      b += model.pv_rate * solar_intensity(hour, 0.0, model);
      break;
    case UavStatus::Away:
      break;
  }
  return std::clamp(b, 0.0, model.b_max);
}

double energy_to_charge(double altitude, const EnergyModel& model) {
  if (altitude >= model.cloud_top) return 0.0;
  return model.climb_cost * (model.cloud_top - altitude);
}

bool is_sustainable(const Uav& uav, const EnergyModel& model) {
  return uav.battery >= energy_to_charge(uav.position.z, model) + model.reserve();
}

}  // namespace ucn
