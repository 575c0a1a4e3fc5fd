#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ucn/config.hpp"
#include "ucn/coverage.hpp"
#include "ucn/ddpg.hpp"
#include "ucn/mlp.hpp"
#include "ucn/replay.hpp"
#include "ucn/world.hpp"

namespace ucn {

/// Local per-UAV encoding: own (x/width, y/height), one active bit per id,
/// slot/T. Dimension 2 + n_max + 1.
std::vector<double> encode_local_state(const WorldState& w, int uav_id);
int local_state_dim(int n_max);

/// Stay-in-place plus 8 compass moves of length delta (index 1 = east,
/// counter-clockwise).
std::vector<Vec2> discrete_actions(double delta);
inline constexpr int kNumDiscreteActions = 9;

/// served/total - lambda * overlap_sum / (pi r^2).
double local_reward(int served_total, int total_users, double overlap_sum,
                    double footprint_r, double lambda);

class DqnAgent {
 public:
  DqnAgent(int state_dim, const DqnConfig& cfg, uint64_t seed);

  /// Epsilon-greedy over Q(s, .); ties by lower action index.
  int act(std::span<const double> state, double eps, std::mt19937_64& rng) const;

  void push(DiscreteTransition t) { buffer_.push(std::move(t)); }
  TrainDiag q_update(std::mt19937_64& rng);

  const Mlp& q_net() const { return q_; }
  Mlp& q_net() { return q_; }
  Mlp& target_net() { return target_; }
  const ReplayBuffer<DiscreteTransition>& buffer() const { return buffer_; }
  const DqnConfig& config() const { return cfg_; }

 private:
  DqnConfig cfg_;
  Mlp q_, target_;
  Adam opt_;
  ReplayBuffer<DiscreteTransition> buffer_;
  mutable Mlp::Tape tape_;
  std::vector<double> grad_;
};

/// Random quit schedule: a uniform permutation of ids quits at increasing
/// random slots, from the full crew down to a single survivor.
struct QuitSchedule {
  std::vector<std::pair<int, int>> quits;  // (slot, uav_id), slots increasing
  std::vector<int> order;                  // ids in quit order
};

QuitSchedule random_quit_schedule(int n_max, int slots, std::mt19937_64& rng);

/// Two complementary environment copies: A starts with the full crew, B
/// empty; each quit from A becomes a join into B at the quitting position.
struct DualEpisodeResult {
  double mean_return = 0.0;          // per-agent average of summed rewards
  bool partition_ok = true;          // active(A), active(B) partition the ids
  std::vector<int> quit_order;
  std::vector<uint64_t> pushes_a;    // per agent
  std::vector<uint64_t> pushes_b;
  double mean_loss = 0.0;
  uint64_t updates = 0;
};

class MarlTrainer {
 public:
  MarlTrainer(const ExperimentConfig& cfg, uint64_t seed);

  /// One heterogeneous dual-copy episode; trains each agent once per slot
  /// after warm-up when `train` is set.
  DualEpisodeResult run_dual_episode(const QuitSchedule& schedule,
                                     double eps, bool train);

  std::vector<CurvePoint> train(int episodes);

  double epsilon(int episode, int total_episodes) const;

  DqnAgent& agent(int id) { return *agents_[static_cast<std::size_t>(id)]; }
  const DqnAgent& agent(int id) const {
    return *agents_[static_cast<std::size_t>(id)];
  }
  int n_agents() const { return static_cast<int>(agents_.size()); }
  std::mt19937_64& rng() { return rng_; }

  Checkpoint make_checkpoint() const;
  void load_checkpoint_into(const Checkpoint& ckpt);

 private:
  ExperimentConfig cfg_;
  std::vector<std::unique_ptr<DqnAgent>> agents_;
  std::mt19937_64 rng_;
  uint64_t seed_;
  int episodes_run_ = 0;
};

/// Noise-free rollout of per-UAV policies on a scenario with scripted
/// quit/join events; emits traces and per-event service windows.
EvalReport evaluate_marl(const MarlTrainer& trainer, const ExperimentConfig& cfg,
                         std::span<const uint64_t> seeds,
                         const EvalOptions& opts = {});

}  // namespace ucn
