#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ucn/energy.hpp"
#include "ucn/geometry.hpp"

namespace ucn {

struct ScenarioConfig;  // config.hpp

struct SlotClock {
  int slot_index = 0;
  int slots_per_episode = 100;
  double slot_duration = 10.0;  // seconds
  int start_hour = 0;

  double hour_of_day() const {
    double h = start_hour + slot_index * slot_duration / 3600.0;
    return std::fmod(h, 24.0);
  }
};

struct Cluster {
  Vec2 center;
  Vec2 velocity;  // meters per slot, applied to the center
  double std_dev = 100.0;
  double weight = 1.0;
};

struct UserField {
  std::vector<Cluster> clusters;
  int total_users = 100;
  std::array<double, 24> demand = {};  // active-user fraction per hour of day
};

enum class UavStatus : uint8_t { Serving, Away, Charging, Idle };

const char* to_string(UavStatus s);

struct Uav {
  int id = 0;
  Vec3 position;
  double battery = 0.0;
  UavStatus status = UavStatus::Serving;
  int join_countdown = 0;  // > 0 only while AWAY and pending a join
};

enum class CrewEventKind : uint8_t { Quit, Join };

struct CrewEvent {
  CrewEventKind kind = CrewEventKind::Quit;
  int uav_id = 0;
  int slot = -1;             // slot trigger; -1 when battery-triggered
  double battery = -1.0;     // battery trigger for quits; -1 when unused
  int countdown = 5;         // join only: slots from trigger to serving
  bool fired = false;
};

/// Per-world constants the slot update needs.
struct WorldParams {
  double d_max = 30.0;       // max displacement per slot
  double h_serve = 100.0;    // serving altitude
  Vec2 spawn;                // where joiners appear
  double join_battery = 500.0;
  double quit_threshold = 25.0;  // battery level at which a serving UAV quits
  EnergyModel energy;
};

struct WorldState {
  Region region;
  SlotClock clock;
  UserField users;
  WorldParams params;
  std::vector<Uav> uavs;  // index == id, ids 0..n-1
  std::vector<CrewEvent> events;
  uint64_t rng_seed = 0;

  /// FNV-1a over every field, for bit-identity checks.
  uint64_t fingerprint() const;
};

/// What happened during one slot, for rewards and traces.
struct StepInfo {
  std::vector<uint8_t> out_of_bound;  // per UAV: clamped at the boundary
  std::vector<uint8_t> clipped;       // per UAV: displacement exceeded d_max
  std::vector<double> moved;          // per UAV: distance actually flown
  std::vector<int> quits;             // ids that went AWAY this slot
  std::vector<int> join_started;      // ids whose countdown began this slot
  std::vector<int> joined;            // ids that became SERVING this slot
  std::vector<std::string> events_fired;

  int out_of_bound_count() const;
};

/// Builds the initial world from a validated scenario. Deterministic in
/// (config, seed). Throws ConfigError on invalid scenarios.
WorldState init_world(const ScenarioConfig& config, uint64_t seed);

/// Users active this slot: Gaussian-mixture positions with drifted cluster
/// centers, clamped to the region. Deterministic in (rng_seed, slot_index).
std::vector<Vec2> sample_users(const WorldState& state);

/// Advances one slot: moves SERVING UAVs (clipping displacements to d_max
/// and clamping to the region), steps batteries, fires due crew events and
/// ticks join countdowns. Displacements of non-SERVING UAVs are ignored.
StepInfo advance_slot(WorldState& state, std::span<const Vec2> movements);

struct ActiveSet {
  std::vector<int> serving;
  std::vector<int> joining;  // AWAY with a running countdown
};

ActiveSet active_set(const WorldState& state);

}  // namespace ucn
