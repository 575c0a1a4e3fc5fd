#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ucn/config.hpp"
#include "ucn/mlp.hpp"
#include "ucn/replay.hpp"
#include "ucn/trace.hpp"
#include "ucn/world.hpp"

namespace ucn {

struct Checkpoint;

/// Fixed-dimension global encoding: for each id 0..n_max-1 the block
/// (x/width, y/height, battery/b_max, countdown/T), then slot/T.
/// Dimension 4*n_max + 1 regardless of the active crew.
std::vector<double> encode_global_state(const WorldState& w);
int global_state_dim(int n_max);

/// served/total - beta * oob_flags / max(1, active).
double global_reward(int served, int total_users, int out_of_bound_flags,
                     int active_count, double beta);

struct TrainDiag {
  bool ready = false;
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, mu(s)) before the update
  double mean_target = 0.0;      // mean critic regression target
};

/// DDPG agent over continuous [-1,1]^action_dim actions.
class DdpgAgent {
 public:
  DdpgAgent(int state_dim, int action_dim, const DdpgConfig& cfg,
            uint64_t seed);

  /// Actor forward; adds N(0, sigma) per dimension and clamps to [-1,1]
  /// when sigma > 0.
  std::vector<double> act(std::span<const double> state, double sigma,
                          std::mt19937_64* noise_rng) const;

  TrainDiag train_step(ReplayBuffer<Transition>& buffer, std::mt19937_64& rng);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const DdpgConfig& config() const { return cfg_; }

  const Mlp& actor() const { return actor_; }
  Mlp& actor() { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  Mlp& mutable_critic() { return critic_; }
  Mlp& mutable_target_actor() { return target_actor_; }
  Mlp& mutable_target_critic() { return target_critic_; }

  void save_into(Checkpoint& ckpt, const std::string& prefix = "") const;
  void load_from(const Checkpoint& ckpt, const std::string& prefix = "");

 private:
  int state_dim_;
  int action_dim_;
  DdpgConfig cfg_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  Adam actor_opt_, critic_opt_;
  // per-step scratch, single trainer ownership
  mutable Mlp::Tape tape_a_, tape_c_;
  std::vector<double> grad_actor_, grad_critic_;
};

/// Slot-level environment around WorldState for global positioning control.
class PositioningEnv {
 public:
  explicit PositioningEnv(const ExperimentConfig& cfg);

  void reset(uint64_t seed);
  std::vector<double> state() const { return encode_global_state(world_); }

  struct Step {
    double reward = 0.0;
    bool terminal = false;
    int served = 0;
    int total_users = 0;
    StepInfo info;
  };

  /// `action` in [-1,1]^{2 n_max}; per-UAV displacement is scaled by d_max.
  /// Non-active components are ignored by the world transition.
  Step step(std::span<const double> action);

  /// True within +/- window slots of any unfired scripted event.
  bool near_scripted_event(int window) const;

  const WorldState& world() const { return world_; }
  WorldState& mutable_world() { return world_; }
  int state_dim() const { return global_state_dim(cfg_.scenario.n_max); }
  int action_dim() const { return 2 * cfg_.scenario.n_max; }

 private:
  ExperimentConfig cfg_;
  WorldState world_;
};

struct TrainOptions {
  int episodes = 300;
  int workers = 1;
  uint64_t seed = 1;
  double wall_limit_s = 0.0;  // optional: stop starting episodes after this
};

struct ApcRunResult {
  std::vector<CurvePoint> curve;               // one point per episode
  std::vector<uint64_t> worker_transitions;    // collected, per worker
  uint64_t train_steps = 0;
  uint64_t transitions = 0;
};

/// Exploration noise for a given global episode index: linear decay from
/// sigma_start to sigma_end over the first sigma_decay_frac of episodes.
double noise_sigma(const DdpgConfig& cfg, int episode, int total_episodes);

/// Host/worker training loop. One host agent; `workers` environment copies
/// differing only in seed streams; workers push transitions to the shared
/// buffer and the host performs one train step per collected transition.
/// workers == 1 runs single-threaded and is the determinism reference.
template <class Env>
ApcRunResult apc_run(DdpgAgent& agent, std::function<Env(int)> make_env,
                     const TrainOptions& opt);

extern template ApcRunResult apc_run<PositioningEnv>(
    DdpgAgent&, std::function<PositioningEnv(int)>, const TrainOptions&);

struct EventWindow {
  int slot = 0;
  std::string kind;
  int uav_id = 0;
  double pre_mean_served = 0.0;   // 10 slots up to the event
  double post_mean_served = 0.0;  // 10 slots after the event
};

struct EvalRun {
  uint64_t seed = 0;
  double mean_served = 0.0;
  double total_reward = 0.0;
  std::vector<EventWindow> windows;
  std::vector<int> served_per_slot;
};

struct EvalReport {
  std::vector<EvalRun> runs;
  double mean_served = 0.0;  // across runs
};

struct EvalOptions {
  /// Freeze all movement after the first fired scripted event (baseline).
  bool freeze_after_event = false;
  /// Per-seed trace file prefix; empty disables traces.
  std::filesystem::path trace_prefix;
};

/// Noise-free rollouts across seeds with trace emission and pre/post event
/// service windows.
EvalReport evaluate_ddpg(const DdpgAgent& agent, const ExperimentConfig& cfg,
                         std::span<const uint64_t> seeds,
                         const EvalOptions& opts = {});

Checkpoint make_ddpg_checkpoint(const DdpgAgent& agent,
                                const ExperimentConfig& cfg);
DdpgAgent agent_from_checkpoint(const Checkpoint& ckpt, const DdpgConfig& cfg);

}  // namespace ucn
