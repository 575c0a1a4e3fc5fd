#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ucn/coverage.hpp"
#include "ucn/world.hpp"

namespace ucn {

/// One UAV's configured starting pose.
struct UavStart {
  double x = 0.0;
  double y = 0.0;
  bool away = false;  // starts outside the serving crew
};

/// World + coverage + energy scenario block.
struct ScenarioConfig {
  Region region;
  int n_max = 5;
  int slots = 100;
  double slot_duration = 10.0;
  int start_hour = 0;

  double d_max = 30.0;
  double h_serve = 100.0;
  Vec2 spawn = {0.0, 500.0};
  double join_battery_frac = 1.0;
  double initial_battery_frac = 1.0;
  double quit_threshold_frac = 0.05;
  std::vector<UavStart> uav_starts;  // empty: deterministic ring default

  UserField users;
  std::vector<CrewEvent> events;

  EnergyModel energy;
  CoverageModel coverage;

  void validate() const;  // throws ConfigError
  /// Ring default for ids without an explicit [[uav]] entry.
  UavStart default_start(int id) const;
};

struct DdpgConfig {
  std::vector<int> hidden = {64, 64};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  double tau = 0.005;
  int batch = 64;
  int buffer_capacity = 100000;
  int warmup = 64;  // min transitions before training
  double sigma_start = 0.3;
  double sigma_end = 0.05;
  double sigma_decay_frac = 0.6;  // fraction of episodes over which sigma decays
  double beta = 0.5;              // out-of-bound penalty weight
  bool event_boost = false;       // widen exploration near scripted events
  double event_boost_factor = 2.0;
  int event_boost_window = 5;
};

struct DqnConfig {
  std::vector<int> hidden = {64, 64};
  double lr = 5e-4;
  double gamma = 0.99;
  double tau = 0.005;
  int batch = 64;
  int buffer_capacity = 100000;
  int warmup = 64;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_decay_frac = 0.5;
  double delta = 25.0;   // discrete move step, meters
  double lambda = 0.3;   // overlap penalty weight
};

struct SchedulerConfig {
  int hours = 24;
  double p_min = 0.6;          // minimum overall service fraction
  double coeff = 0.5;          // energy-vs-service trade-off weight
  double theta_charge = 0.5;   // non-serving UAVs below this score charge
  double theta_serve = 0.75;   // non-floor UAVs at/above this score also serve
  int restarts = 10;           // k-means restarts in the mapping oracle
  int mapping_episodes = 60;   // DDPG backend budget per mapping cell
  std::string backend = "oracle";  // "oracle" | "ddpg"
};

struct RunConfig {
  int episodes = 300;
  int workers = 1;
  uint64_t seed = 1;
  std::string out_dir;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  DdpgConfig ddpg;
  DqnConfig dqn;
  SchedulerConfig sched;
  RunConfig run;
};

/// Parses the TOML-style config text. Every field defaults; unknown keys are
/// rejected with a line-anchored ConfigError. `source_name` is used in
/// messages.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name);

ExperimentConfig load_config(const std::filesystem::path& file);

/// Applies "section.key=value" overrides on top of a parsed config.
void apply_overrides(ExperimentConfig& cfg,
                     const std::vector<std::string>& overrides);

/// Canonical TOML-style echo of the resolved config; stable field order and
/// full precision, suitable for hashing and reproduction.
std::string serialize_config(const ExperimentConfig& cfg);

uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace ucn
