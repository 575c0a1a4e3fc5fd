#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ucn/config.hpp"
#include "ucn/ddpg.hpp"

namespace ucn {

/// Per-hour map from serving-UAV count to maximum servable users
/// (sub-problem 1 output). Monotone non-decreasing in k for each hour.
struct MappingTable {
  int n_max = 0;
  int hours = 0;
  std::vector<double> users;          // (n_max+1) x hours, row-major in k
  std::vector<std::string> backends;  // provenance per cell: oracle | learned

  double at(int k, int h) const;
  void set(int k, int h, double v, const std::string& backend);
  void enforce_monotone();  // running maxima over k, per hour

  void save_csv(const std::filesystem::path& file) const;
  static MappingTable load_csv(const std::filesystem::path& file);
};

enum class MappingBackend { Oracle, Ddpg };

/// Builds U[k][h] for k = 0..n_max over the scheduling horizon. The oracle
/// backend places k UAVs by k-means on the hour's user sample (best of
/// `restarts` by served count); the ddpg backend trains a small positioning
/// policy per cell. Deterministic given seed.
MappingTable build_mapping(const ExperimentConfig& cfg, MappingBackend backend,
                           uint64_t seed);

/// Per-hour demand in users: ceil(total_users * demand(hour_of_day)).
std::vector<int> hourly_demand(const ExperimentConfig& cfg);

/// The deterministic user sample build_mapping evaluates for one hour.
std::vector<Vec2> mapping_hour_users(const ExperimentConfig& cfg, int hour,
                                     uint64_t mapping_seed);

/// Least k with U[k][h] >= p_min * demand[h]; throws InfeasibleError naming
/// the first failing hour.
std::vector<int> baseline_min_uavs(const MappingTable& map,
                                   std::span<const int> demand, double p_min);

enum class SchedStatus : uint8_t { Serve, Charge, Idle };
const char* to_string(SchedStatus s);

struct RepairInput {
  std::span<const double> scores;          // per UAV, in [0,1]
  std::span<const double> batteries;       // Wh
  std::span<const SchedStatus> prev_status;
  int k_min = 0;
  double h_serve = 100.0;
  double theta_charge = 0.5;
  double theta_serve = 0.75;
  const EnergyModel* energy = nullptr;
};

struct RepairResult {
  std::vector<SchedStatus> status;
  bool shortfall = false;  // fewer serve-capable UAVs than k_min
};

/// Deterministic repair pipeline: force-charge UAVs that cannot fund one
/// more non-charging hour, fill the k_min service floor by score rank (ties
/// by lower id), let remaining high scorers serve and split the rest into
/// charge/idle by theta_charge.
RepairResult relax_and_repair(const RepairInput& in);

/// Per-hour reward: (1-coeff) * served/demand, plus the terminal energy
/// bonus coeff * sum(b)/(N * b_max) at the final hour; violations add -1.
double scheduler_reward(int served, int demand, double battery_sum,
                        int n_uavs, double b_max, int hour, int horizon,
                        double coeff, bool violation);

/// Hour-scale charging-profile environment shared by training, evaluation
/// and brute-force search. A violation (service floor or sustainability)
/// is recorded and terminates the episode.
class SchedulerEnv {
 public:
  SchedulerEnv(const ExperimentConfig& cfg, const MappingTable& map);

  void reset(uint64_t seed);
  std::vector<double> state() const;

  struct Step {
    double reward = 0.0;
    bool terminal = false;
    int served = 0;
    int demand = 0;
    bool violation = false;
    std::vector<SchedStatus> status;
  };

  /// Policy path: actor actions in [-1,1] are rescaled to [0,1] scores and
  /// repaired into statuses.
  Step step(std::span<const double> action);
  /// Score path: per-UAV scores in [0,1] -> relax_and_repair -> dynamics.
  Step step_scores(std::span<const double> scores);
  /// Fixed-profile path, same dynamics and feasibility rules.
  Step step_statuses(std::span<const SchedStatus> statuses);

  bool near_scripted_event(int) const { return false; }

  int state_dim() const { return 4 * n_ + 1; }
  int action_dim() const { return n_; }
  int hours() const { return horizon_; }
  int n_uavs() const { return n_; }
  int k_min(int hour) const { return k_min_[static_cast<std::size_t>(hour)]; }
  int demand(int hour) const { return demand_[static_cast<std::size_t>(hour)]; }
  const std::vector<double>& batteries() const { return battery_; }
  int hour_index() const { return hour_; }
  int violations() const { return violations_; }

 private:
  ExperimentConfig cfg_;
  MappingTable map_;
  int n_;
  int horizon_;
  std::vector<int> demand_;
  std::vector<int> k_min_;
  std::vector<double> battery_;
  std::vector<SchedStatus> status_;
  int hour_ = 0;
  int violations_ = 0;

  double altitude_of(SchedStatus s) const;
};

struct SchedulerTrainResult {
  std::vector<CurvePoint> curve;
  double final_objective = 0.0;       // noise-free rollout after training
  int final_violations = 0;
};

/// Sub-problem 2: DDPG over per-UAV scores with the relax-and-repair
/// environment. Throws InfeasibleError when the baseline is infeasible.
SchedulerTrainResult train_scheduler(DdpgAgent& agent,
                                     const ExperimentConfig& cfg,
                                     const MappingTable& map,
                                     const TrainOptions& opt);

struct ChargeProfile {
  int n_uavs = 0;
  int hours = 0;
  std::vector<SchedStatus> status;   // n x hours, row-major in uav
  std::vector<double> battery;       // battery after each hour, same layout
  double objective = 0.0;
  int total_served = 0;
  double final_energy = 0.0;         // sum of final batteries
  int violations = 0;

  SchedStatus at(int uav, int hour) const;
  void save_csv(const std::filesystem::path& file) const;
};

/// Noise-free rollout of a trained policy into a concrete profile.
ChargeProfile rollout_profile(const DdpgAgent& agent,
                              const ExperimentConfig& cfg,
                              const MappingTable& map);

/// Evaluates a fixed status assignment under the same dynamics.
ChargeProfile rollout_fixed(const ExperimentConfig& cfg,
                            const MappingTable& map,
                            std::span<const SchedStatus> profile);

struct EnumerateResult {
  ChargeProfile best;
  uint64_t profiles = 0;
};

/// Exhaustive search over all 3^(N*H) status assignments; refuses instances
/// beyond 10^6 profiles (throws EnumerationTooLarge with a size report).
EnumerateResult enumerate_optimal(const ExperimentConfig& cfg,
                                  const MappingTable& map, double coeff);

Checkpoint make_scheduler_checkpoint(const DdpgAgent& agent,
                                     const ExperimentConfig& cfg,
                                     const MappingTable& map);
MappingTable mapping_from_checkpoint(const Checkpoint& ckpt);

}  // namespace ucn
