#include "ucn/world.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "ucn/checkpoint.hpp"
#include "ucn/config.hpp"
#include "ucn/errors.hpp"
#include "ucn/rng.hpp"

namespace ucn {

const char* to_string(UavStatus s) {
  switch (s) {
    case UavStatus::Serving: return "serving";
    case UavStatus::Away: return "away";
    case UavStatus::Charging: return "charging";
    case UavStatus::Idle: return "idle";
  }
  return "?";
}

int StepInfo::out_of_bound_count() const {
  int n = 0;
  for (uint8_t f : out_of_bound) n += f != 0;
  return n;
}

namespace {

void hash_bytes(uint64_t& h, const void* p, std::size_t n) {
  h = fnv1a64(p, n, h);
}

template <class T>
void hash_pod(uint64_t& h, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  hash_bytes(h, &v, sizeof(v));
}

}  // namespace

uint64_t WorldState::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  hash_pod(h, region.width);
  hash_pod(h, region.height);
  hash_pod(h, clock.slot_index);
  hash_pod(h, clock.slots_per_episode);
  hash_pod(h, clock.slot_duration);
  hash_pod(h, clock.start_hour);
  hash_pod(h, rng_seed);
  for (const Uav& u : uavs) {
    hash_pod(h, u.id);
    hash_pod(h, u.position);
    hash_pod(h, u.battery);
    hash_pod(h, u.status);
    hash_pod(h, u.join_countdown);
  }
  for (const CrewEvent& e : events) {
    hash_pod(h, e.kind);
    hash_pod(h, e.uav_id);
    hash_pod(h, e.slot);
    hash_pod(h, e.battery);
    hash_pod(h, e.countdown);
    hash_pod(h, e.fired);
  }
  return h;
}

WorldState init_world(const ScenarioConfig& config, uint64_t seed) {
  config.validate();

  WorldState w;
  w.region = config.region;
  w.clock = {0, config.slots, config.slot_duration, config.start_hour};
  w.users = config.users;
  w.params.d_max = config.d_max;
  w.params.h_serve = config.h_serve;
  w.params.spawn = config.spawn;
  w.params.energy = config.energy;
  w.params.join_battery = config.join_battery_frac * config.energy.b_max;
  w.params.quit_threshold = config.quit_threshold_frac * config.energy.b_max;
  w.rng_seed = seed;
  w.events = config.events;

  w.uavs.reserve(static_cast<std::size_t>(config.n_max));
  for (int id = 0; id < config.n_max; ++id) {
    UavStart start = id < static_cast<int>(config.uav_starts.size())
                         ? config.uav_starts[static_cast<std::size_t>(id)]
                         : config.default_start(id);
    Uav u;
    u.id = id;
    u.position = {start.x, start.y, config.h_serve};
    u.battery = config.initial_battery_frac * config.energy.b_max;
    u.status = start.away ? UavStatus::Away : UavStatus::Serving;
    w.uavs.push_back(u);
  }
  return w;
}

std::vector<Vec2> sample_users(const WorldState& state) {
  const UserField& uf = state.users;
  double hour = state.clock.hour_of_day();
  int h = static_cast<int>(std::floor(hour)) % 24;
  double frac = uf.demand[static_cast<std::size_t>(h)];
  int n = static_cast<int>(std::ceil(uf.total_users * frac));
  std::vector<Vec2> out;
  if (n <= 0 || uf.clusters.empty()) return out;
  out.reserve(static_cast<std::size_t>(n));

  auto rng = make_rng(mix_seed(state.rng_seed, stream_tag("users"),
                               static_cast<uint64_t>(state.clock.slot_index)));
  std::vector<double> weights;
  weights.reserve(uf.clusters.size());
  for (const Cluster& c : uf.clusters) weights.push_back(c.weight);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> gauss(0.0, 1.0);

  double t = state.clock.slot_index;
  for (int i = 0; i < n; ++i) {
    const Cluster& c = uf.clusters[static_cast<std::size_t>(pick(rng))];
    Vec2 center = c.center + c.velocity * t;
    Vec2 p{center.x + c.std_dev * gauss(rng), center.y + c.std_dev * gauss(rng)};
    out.push_back(state.region.clamp(p));
  }
  return out;
}

StepInfo advance_slot(WorldState& state, std::span<const Vec2> movements) {
  if (state.clock.slot_index >= state.clock.slots_per_episode)
    throw std::logic_error("advance_slot: episode already over");

  const std::size_t n = state.uavs.size();
  StepInfo info;
  info.out_of_bound.assign(n, 0);
  info.clipped.assign(n, 0);
  info.moved.assign(n, 0.0);

  const int t = state.clock.slot_index;
  const double hour = state.clock.hour_of_day();

  // 1. movement (SERVING only), clipped to d_max, clamped to the region
  for (std::size_t i = 0; i < n; ++i) {
    Uav& u = state.uavs[i];
    if (u.status != UavStatus::Serving) continue;
    Vec2 d = i < movements.size() ? movements[i] : Vec2{};
    double len = d.norm();
    if (len > state.params.d_max) {
      d = d * (state.params.d_max / len);
      info.clipped[i] = 1;
    }
    Vec2 target = u.position.ground() + d;
    Vec2 clamped = state.region.clamp(target);
    if (clamped.x != target.x || clamped.y != target.y) info.out_of_bound[i] = 1;
    info.moved[i] = (clamped - u.position.ground()).norm();
    u.position.x = clamped.x;
    u.position.y = clamped.y;
  }

  // 2. batteries
  for (std::size_t i = 0; i < n; ++i)
    state.uavs[i].battery =
        step_battery(state.uavs[i], info.moved[i], state.params.energy, hour);

  // 3. join countdowns tick before new events fire
  for (Uav& u : state.uavs) {
    if (u.join_countdown > 0) {
      if (--u.join_countdown == 0) {
        u.status = UavStatus::Serving;
        u.position = {state.params.spawn.x, state.params.spawn.y,
                      state.params.h_serve};
        u.battery = state.params.join_battery;
        info.joined.push_back(u.id);
        info.events_fired.push_back("join:" + std::to_string(u.id));
      }
    }
  }

  // 4. scripted events due this slot
  for (CrewEvent& e : state.events) {
    if (e.fired) continue;
    Uav& u = state.uavs[static_cast<std::size_t>(e.uav_id)];
    bool due = false;
    if (e.slot >= 0) {
      due = e.slot == t;
    } else if (e.battery >= 0.0 && e.kind == CrewEventKind::Quit) {
      due = u.status == UavStatus::Serving && u.battery <= e.battery;
    }
    if (!due) continue;
    e.fired = true;
    if (e.kind == CrewEventKind::Quit) {
      if (u.status != UavStatus::Serving)
        throw ConfigError("quit event for non-serving UAV " +
                          std::to_string(e.uav_id));
      u.status = UavStatus::Away;
      info.quits.push_back(u.id);
      info.events_fired.push_back("quit:" + std::to_string(u.id));
    } else {
      if (u.status != UavStatus::Away || u.join_countdown > 0)
        throw ConfigError("join event for non-away UAV " +
                          std::to_string(e.uav_id));
      if (e.countdown <= 0) {
        u.status = UavStatus::Serving;
        u.position = {state.params.spawn.x, state.params.spawn.y,
                      state.params.h_serve};
        u.battery = state.params.join_battery;
        info.joined.push_back(u.id);
        info.events_fired.push_back("join:" + std::to_string(u.id));
      } else {
        u.join_countdown = e.countdown;
        info.join_started.push_back(u.id);
        info.events_fired.push_back("join_start:" + std::to_string(u.id));
      }
    }
  }

  // 5. battery-threshold quits
  for (Uav& u : state.uavs) {
    if (u.status == UavStatus::Serving &&
        u.battery <= state.params.quit_threshold) {
      u.status = UavStatus::Away;
      info.quits.push_back(u.id);
      info.events_fired.push_back("quit:" + std::to_string(u.id));
    }
  }

  state.clock.slot_index = t + 1;
  return info;
}

ActiveSet active_set(const WorldState& state) {
  ActiveSet s;
  for (const Uav& u : state.uavs) {
    if (u.status == UavStatus::Serving) s.serving.push_back(u.id);
    if (u.join_countdown > 0) s.joining.push_back(u.id);
  }
  return s;
}

}  // namespace ucn
