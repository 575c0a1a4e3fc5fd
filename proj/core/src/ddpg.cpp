#include "ucn/ddpg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "ucn/checkpoint.hpp"
#include "ucn/coverage.hpp"
#include "ucn/errors.hpp"
#include "ucn/rng.hpp"
#include "ucn/sched.hpp"

namespace ucn {

int global_state_dim(int n_max) { return 4 * n_max + 1; }

std::vector<double> encode_global_state(const WorldState& w) {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(global_state_dim(static_cast<int>(w.uavs.size()))));
  double T = w.clock.slots_per_episode;
  for (const Uav& u : w.uavs) {
    s.push_back(u.position.x / w.region.width);
    s.push_back(u.position.y / w.region.height);
    s.push_back(u.battery / w.params.energy.b_max);
    s.push_back(u.join_countdown / T);
  }
  s.push_back(w.clock.slot_index / T);
  return s;
}

double global_reward(int served, int total_users, int out_of_bound_flags,
                     int active_count, double beta) {
  double service = total_users > 0 ? static_cast<double>(served) / total_users : 0.0;
  return service - beta * out_of_bound_flags / std::max(1, active_count);
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, const DdpgConfig& cfg,
                     uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), cfg_(cfg) {
  std::vector<int> actor_sizes{state_dim};
  for (int h : cfg.hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(action_dim);
  std::vector<int> critic_sizes{state_dim + action_dim};
  for (int h : cfg.hidden) critic_sizes.push_back(h);
  critic_sizes.push_back(1);

  actor_ = Mlp(actor_sizes, OutputActivation::Tanh);
  critic_ = Mlp(critic_sizes, OutputActivation::Identity);
  actor_.init_uniform_fanin(mix_seed(seed, stream_tag("actor")));
  critic_.init_uniform_fanin(mix_seed(seed, stream_tag("critic")));
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Adam(actor_.param_count(), cfg.actor_lr);
  critic_opt_ = Adam(critic_.param_count(), cfg.critic_lr);
  grad_actor_.resize(actor_.param_count());
  grad_critic_.resize(critic_.param_count());
}

std::vector<double> DdpgAgent::act(std::span<const double> state, double sigma,
                                   std::mt19937_64* noise_rng) const {
  std::vector<double> a = actor_.forward(state);
  if (sigma > 0.0 && noise_rng) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : a) v = std::clamp(v + noise(*noise_rng), -1.0, 1.0);
  }
  return a;
}

TrainDiag DdpgAgent::train_step(ReplayBuffer<Transition>& buffer,
                                std::mt19937_64& rng) {
  TrainDiag diag;
  auto batch_opt = buffer.sample(static_cast<std::size_t>(cfg_.batch), rng);
  if (!batch_opt) return diag;
  const auto& batch = *batch_opt;
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  // critic regression toward r + gamma (1-terminal) Q_t(s', mu_t(s'))
  std::fill(grad_critic_.begin(), grad_critic_.end(), 0.0);
  std::vector<double> sa(static_cast<std::size_t>(state_dim_ + action_dim_));
  std::vector<double> targets(batch.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const Transition& t = batch[k];
    double y = t.reward;
    if (!t.terminal) {
      std::vector<double> a2 = target_actor_.forward(t.next_state);
      std::copy(t.next_state.begin(), t.next_state.end(), sa.begin());
      std::copy(a2.begin(), a2.end(), sa.begin() + state_dim_);
      y += cfg_.gamma * target_critic_.forward(sa)[0];
    }
    targets[k] = y;

    std::copy(t.state.begin(), t.state.end(), sa.begin());
    std::copy(t.action.begin(), t.action.end(), sa.begin() + state_dim_);
    critic_.forward(sa, tape_c_);
    double q = tape_c_.act.back()[0];
    double err = q - y;
    loss += err * err * inv_b;
    double upstream[1] = {2.0 * err * inv_b};
    critic_.backward(tape_c_, upstream, grad_critic_);
  }
  critic_opt_.step(critic_.params(), grad_critic_);

  // actor ascent on Q(s, mu(s)) through the updated critic
  std::fill(grad_actor_.begin(), grad_actor_.end(), 0.0);
  std::vector<double> input_grad(static_cast<std::size_t>(state_dim_ + action_dim_));
  std::vector<double> zero_critic_grad(critic_.param_count());
  double objective = 0.0;
  for (const Transition& t : batch) {
    actor_.forward(t.state, tape_a_);
    const auto& mu = tape_a_.act.back();
    std::copy(t.state.begin(), t.state.end(), sa.begin());
    std::copy(mu.begin(), mu.end(), sa.begin() + state_dim_);
    critic_.forward(sa, tape_c_);
    objective += tape_c_.act.back()[0] * inv_b;
    // dQ/da, chained into the actor as a minimization of -Q
    double upstream[1] = {1.0};
    std::fill(input_grad.begin(), input_grad.end(), 0.0);
    std::fill(zero_critic_grad.begin(), zero_critic_grad.end(), 0.0);
    critic_.backward(tape_c_, upstream, zero_critic_grad, input_grad);
    std::vector<double> dq_da(input_grad.begin() + state_dim_, input_grad.end());
    for (double& g : dq_da) g = -g * inv_b;
    actor_.backward(tape_a_, dq_da, grad_actor_);
  }
  actor_opt_.step(actor_.params(), grad_actor_);

  soft_update(target_actor_, actor_, cfg_.tau);
  soft_update(target_critic_, critic_, cfg_.tau);

  diag.ready = true;
  diag.critic_loss = loss;
  diag.actor_objective = objective;
  double tsum = 0.0;
  for (double y : targets) tsum += y;
  diag.mean_target = tsum / static_cast<double>(targets.size());
  return diag;
}

namespace {

void append_mlp(Checkpoint& ckpt, const std::string& name, const Mlp& net) {
  TensorEntry t;
  t.name = name;
  t.shape = {static_cast<int64_t>(net.param_count())};
  t.data.assign(net.params().begin(), net.params().end());
  ckpt.tensors.push_back(std::move(t));
}

void load_mlp(const Checkpoint& ckpt, const std::string& name, Mlp& net) {
  const TensorEntry& t = ckpt.tensor(name);
  if (t.data.size() != net.param_count())
    throw CheckpointError("tensor '" + name + "': expected " +
                          std::to_string(net.param_count()) + " values, found " +
                          std::to_string(t.data.size()));
  std::copy(t.data.begin(), t.data.end(), net.params().begin());
}

void append_vec(Checkpoint& ckpt, const std::string& name,
                std::span<const double> v) {
  TensorEntry t;
  t.name = name;
  t.shape = {static_cast<int64_t>(v.size())};
  t.data.assign(v.begin(), v.end());
  ckpt.tensors.push_back(std::move(t));
}

void load_vec(const Checkpoint& ckpt, const std::string& name,
              std::span<double> v) {
  const TensorEntry& t = ckpt.tensor(name);
  if (t.data.size() != v.size())
    throw CheckpointError("tensor '" + name + "' size mismatch");
  std::copy(t.data.begin(), t.data.end(), v.begin());
}

}  // namespace

void DdpgAgent::save_into(Checkpoint& ckpt, const std::string& prefix) const {
  append_mlp(ckpt, prefix + "actor", actor_);
  append_mlp(ckpt, prefix + "critic", critic_);
  append_mlp(ckpt, prefix + "target_actor", target_actor_);
  append_mlp(ckpt, prefix + "target_critic", target_critic_);
  append_vec(ckpt, prefix + "actor.adam.m", actor_opt_.first_moment());
  append_vec(ckpt, prefix + "actor.adam.v", actor_opt_.second_moment());
  append_vec(ckpt, prefix + "critic.adam.m", critic_opt_.first_moment());
  append_vec(ckpt, prefix + "critic.adam.v", critic_opt_.second_moment());
  ckpt.meta_int[prefix + "actor.steps"] = actor_opt_.step_count();
  ckpt.meta_int[prefix + "critic.steps"] = critic_opt_.step_count();
}

void DdpgAgent::load_from(const Checkpoint& ckpt, const std::string& prefix) {
  load_mlp(ckpt, prefix + "actor", actor_);
  load_mlp(ckpt, prefix + "critic", critic_);
  load_mlp(ckpt, prefix + "target_actor", target_actor_);
  load_mlp(ckpt, prefix + "target_critic", target_critic_);
  load_vec(ckpt, prefix + "actor.adam.m", actor_opt_.first_moment());
  load_vec(ckpt, prefix + "actor.adam.v", actor_opt_.second_moment());
  load_vec(ckpt, prefix + "critic.adam.m", critic_opt_.first_moment());
  load_vec(ckpt, prefix + "critic.adam.v", critic_opt_.second_moment());
  actor_opt_.set_step_count(ckpt.meta(prefix + "actor.steps"));
  critic_opt_.set_step_count(ckpt.meta(prefix + "critic.steps"));
}

PositioningEnv::PositioningEnv(const ExperimentConfig& cfg) : cfg_(cfg) {
  world_ = init_world(cfg_.scenario, 0);
}

void PositioningEnv::reset(uint64_t seed) {
  world_ = init_world(cfg_.scenario, seed);
}

PositioningEnv::Step PositioningEnv::step(std::span<const double> action) {
  const int n = cfg_.scenario.n_max;
  std::vector<Vec2> moves(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    moves[static_cast<std::size_t>(i)] = {
        std::clamp(action[static_cast<std::size_t>(2 * i)], -1.0, 1.0) * cfg_.scenario.d_max,
        std::clamp(action[static_cast<std::size_t>(2 * i + 1)], -1.0, 1.0) * cfg_.scenario.d_max};
  }

  Step out;
  out.info = advance_slot(world_, moves);

  std::vector<Vec2> users = sample_users(world_);
  std::vector<ServingUav> serving;
  for (const Uav& u : world_.uavs)
    if (u.status == UavStatus::Serving)
      serving.push_back({u.id, u.position.ground(), u.position.z});
  ServedResult served = count_served(users, serving, cfg_.scenario.coverage);

  out.served = served.total;
  out.total_users = static_cast<int>(users.size());
  int active = static_cast<int>(active_set(world_).serving.size());
  out.reward = global_reward(out.served, std::max(1, out.total_users),
                             out.info.out_of_bound_count(), active,
                             cfg_.ddpg.beta);
  out.terminal = world_.clock.slot_index >= world_.clock.slots_per_episode;
  return out;
}

bool PositioningEnv::near_scripted_event(int window) const {
  int t = world_.clock.slot_index;
  for (const CrewEvent& e : world_.events)
    if (!e.fired && e.slot >= 0 && std::abs(e.slot - t) <= window) return true;
  return false;
}

double noise_sigma(const DdpgConfig& cfg, int episode, int total_episodes) {
  double span = cfg.sigma_decay_frac * total_episodes;
  if (span <= 0) return cfg.sigma_end;
  double f = std::min(1.0, episode / span);
  return cfg.sigma_start + f * (cfg.sigma_end - cfg.sigma_start);
}

namespace {

struct SharedTrainState {
  std::mutex mu;
  std::condition_variable cv;
  uint64_t collected = 0;
  bool done_collecting = false;
  std::vector<CurvePoint> curve;
  double loss_acc = 0.0;
  uint64_t loss_n = 0;
};

}  // namespace

template <class Env>
ApcRunResult apc_run(DdpgAgent& agent, std::function<Env(int)> make_env,
                     const TrainOptions& opt) {
  if (opt.workers < 1) throw ConfigError("apc_run: workers must be >= 1");
  const DdpgConfig& cfg = agent.config();
  ReplayBuffer<Transition> buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  auto train_rng = make_rng(mix_seed(opt.seed, stream_tag("train")));
  const std::size_t warmup =
      static_cast<std::size_t>(std::max(cfg.warmup, cfg.batch));

  ApcRunResult res;
  res.worker_transitions.assign(static_cast<std::size_t>(opt.workers), 0);

  auto episode_seed = [&](int worker, int episode) {
    return mix_seed(opt.seed, stream_tag("env"), static_cast<uint64_t>(worker),
                    static_cast<uint64_t>(episode));
  };
  auto sigma_for = [&](const Env& env, int episode) {
    double s = noise_sigma(cfg, episode, opt.episodes);
    if (cfg.event_boost && env.near_scripted_event(cfg.event_boost_window))
      s *= cfg.event_boost_factor;
    return s;
  };

  if (opt.workers == 1) {
    // single-threaded determinism reference
    Env env = make_env(0);
    auto noise_rng = make_rng(mix_seed(opt.seed, stream_tag("noise"), 0));
    auto start = std::chrono::steady_clock::now();
    double loss_acc = 0.0;
    uint64_t loss_n = 0;
    for (int ep = 0; ep < opt.episodes; ++ep) {
      if (opt.wall_limit_s > 0.0) {
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
        if (el.count() >= opt.wall_limit_s) break;
      }
      env.reset(episode_seed(0, ep));
      std::vector<double> s = env.state();
      double ret = 0.0;
      bool terminal = false;
      while (!terminal) {
        double sigma = sigma_for(env, ep);
        std::vector<double> a = agent.act(s, sigma, &noise_rng);
        auto step = env.step(a);
        std::vector<double> s2 = env.state();
        buffer.push({s, a, step.reward, s2, step.terminal});
        ++res.transitions;
        ++res.worker_transitions[0];
        ret += step.reward;
        s = std::move(s2);
        terminal = step.terminal;
        if (buffer.size() >= warmup) {
          TrainDiag d = agent.train_step(buffer, train_rng);
          if (d.ready) {
            ++res.train_steps;
            loss_acc += d.critic_loss;
            ++loss_n;
          }
        }
      }
      res.curve.push_back({ep, ret, loss_n ? loss_acc / loss_n : 0.0});
      loss_acc = 0.0;
      loss_n = 0;
    }
    return res;
  }

  // parallel workers push transitions; the host trains one step per
  // collected transition. Workers refresh the policy snapshot per episode.
  SharedTrainState shared;
  std::mutex policy_mu;
  Mlp policy_snapshot = agent.actor();
  std::atomic<int> next_episode{0};
  std::atomic<uint64_t> collected{0};
  auto start = std::chrono::steady_clock::now();

  auto worker_fn = [&](int w) {
    Env env = make_env(w);
    auto noise_rng = make_rng(mix_seed(opt.seed, stream_tag("noise"),
                                       static_cast<uint64_t>(w)));
    Mlp local_actor;
    while (true) {
      int ep = next_episode.fetch_add(1);
      if (ep >= opt.episodes) break;
      if (opt.wall_limit_s > 0.0) {
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
        if (el.count() >= opt.wall_limit_s) break;
      }
      {
        std::lock_guard lock(policy_mu);
        local_actor = policy_snapshot;
      }
      env.reset(episode_seed(w, ep));
      std::vector<double> s = env.state();
      double ret = 0.0;
      bool terminal = false;
      while (!terminal) {
        std::vector<double> a = local_actor.forward(s);
        std::normal_distribution<double> noise(0.0, sigma_for(env, ep));
        for (double& v : a) v = std::clamp(v + noise(noise_rng), -1.0, 1.0);
        auto step = env.step(a);
        std::vector<double> s2 = env.state();
        buffer.push({s, a, step.reward, s2, step.terminal});
        res.worker_transitions[static_cast<std::size_t>(w)]++;
        collected.fetch_add(1);
        shared.cv.notify_all();
        ret += step.reward;
        s = std::move(s2);
        terminal = step.terminal;
      }
      std::lock_guard lock(shared.mu);
      shared.curve.push_back(
          {ep, ret, shared.loss_n ? shared.loss_acc / shared.loss_n : 0.0});
      shared.loss_acc = 0.0;
      shared.loss_n = 0;
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(opt.workers));
  for (int w = 0; w < opt.workers; ++w) workers.emplace_back(worker_fn, w);

  std::thread collector([&] {
    for (auto& t : workers) t.join();
    std::lock_guard lock(shared.mu);
    shared.done_collecting = true;
    shared.cv.notify_all();
  });

  uint64_t trained = 0;
  while (true) {
    uint64_t avail;
    {
      std::unique_lock lock(shared.mu);
      shared.cv.wait_for(lock, std::chrono::milliseconds(1), [&] {
        return shared.done_collecting || collected.load() > trained;
      });
      avail = collected.load();
      if (shared.done_collecting && trained >= avail) break;
    }
    while (trained < avail) {
      if (buffer.size() < warmup) {
        ++trained;  // nothing to learn from yet
        continue;
      }
      TrainDiag d = agent.train_step(buffer, train_rng);
      ++trained;
      if (d.ready) {
        ++res.train_steps;
        std::lock_guard lock(shared.mu);
        shared.loss_acc += d.critic_loss;
        ++shared.loss_n;
      }
      if (res.train_steps % 16 == 0) {
        std::lock_guard lock(policy_mu);
        policy_snapshot = agent.actor();
      }
    }
    {
      std::lock_guard lock(policy_mu);
      policy_snapshot = agent.actor();
    }
  }
  collector.join();

  res.curve = std::move(shared.curve);
  std::sort(res.curve.begin(), res.curve.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.episode < b.episode; });
  for (uint64_t c : res.worker_transitions) res.transitions += c;
  return res;
}

template ApcRunResult apc_run<PositioningEnv>(DdpgAgent&,
                                              std::function<PositioningEnv(int)>,
                                              const TrainOptions&);
template ApcRunResult apc_run<SchedulerEnv>(DdpgAgent&,
                                            std::function<SchedulerEnv(int)>,
                                            const TrainOptions&);

EvalReport evaluate_ddpg(const DdpgAgent& agent, const ExperimentConfig& cfg,
                         std::span<const uint64_t> seeds,
                         const EvalOptions& opts) {
  EvalReport report;
  const int window = 10;

  for (uint64_t seed : seeds) {
    PositioningEnv env(cfg);
    env.reset(seed);
    std::unique_ptr<TraceWriter> trace;
    if (!opts.trace_prefix.empty())
      trace = std::make_unique<TraceWriter>(
          opts.trace_prefix.string() + "_seed" + std::to_string(seed) + ".jsonl");

    EvalRun run;
    run.seed = seed;
    std::vector<double> s = env.state();
    bool terminal = false;
    bool frozen = false;
    std::vector<int> event_slots;
    std::vector<std::string> event_kinds;
    std::vector<int> event_ids;
    while (!terminal) {
      std::vector<double> a = agent.act(s, 0.0, nullptr);
      if (frozen) std::fill(a.begin(), a.end(), 0.0);
      auto step = env.step(a);
      run.total_reward += step.reward;
      run.served_per_slot.push_back(step.served);
      if (!step.info.events_fired.empty()) {
        for (int id : step.info.quits) {
          event_slots.push_back(env.world().clock.slot_index - 1);
          event_kinds.push_back("quit");
          event_ids.push_back(id);
        }
        for (int id : step.info.joined) {
          event_slots.push_back(env.world().clock.slot_index - 1);
          event_kinds.push_back("join");
          event_ids.push_back(id);
        }
        if (opts.freeze_after_event) frozen = true;
      }
      if (trace) trace->slot_record(env.world(), step.served, step.info.events_fired);
      s = env.state();
      terminal = step.terminal;
    }

    const auto& sv = run.served_per_slot;
    double sum = 0.0;
    for (int v : sv) sum += v;
    run.mean_served = sv.empty() ? 0.0 : sum / static_cast<double>(sv.size());

    for (std::size_t e = 0; e < event_slots.size(); ++e) {
      EventWindow wdw;
      wdw.slot = event_slots[e];
      wdw.kind = event_kinds[e];
      wdw.uav_id = event_ids[e];
      // served_per_slot[i] is the service level after advancing slot i
      int idx = event_slots[e];
      double pre = 0.0;
      int pre_n = 0;
      for (int i = idx - window; i < idx; ++i)
        if (i >= 0 && i < static_cast<int>(sv.size())) pre += sv[static_cast<std::size_t>(i)], ++pre_n;
      double post = 0.0;
      int post_n = 0;
      for (int i = idx + 1; i <= idx + window; ++i)
        if (i >= 0 && i < static_cast<int>(sv.size())) post += sv[static_cast<std::size_t>(i)], ++post_n;
      wdw.pre_mean_served = pre_n ? pre / pre_n : 0.0;
      wdw.post_mean_served = post_n ? post / post_n : 0.0;
      run.windows.push_back(wdw);
    }
    report.runs.push_back(std::move(run));
  }

  double acc = 0.0;
  for (const EvalRun& r : report.runs) acc += r.mean_served;
  report.mean_served = report.runs.empty() ? 0.0 : acc / static_cast<double>(report.runs.size());
  return report;
}

Checkpoint make_ddpg_checkpoint(const DdpgAgent& agent,
                                const ExperimentConfig& cfg) {
  Checkpoint ckpt;
  ckpt.kind = "ddpg";
  ckpt.meta_int["state_dim"] = agent.state_dim();
  ckpt.meta_int["action_dim"] = agent.action_dim();
  ckpt.meta_int["n_max"] = cfg.scenario.n_max;
  ckpt.meta_int["seed"] = static_cast<int64_t>(cfg.run.seed);
  ckpt.set_meta_int_list("hidden", cfg.ddpg.hidden);
  agent.save_into(ckpt);
  return ckpt;
}

DdpgAgent agent_from_checkpoint(const Checkpoint& ckpt, const DdpgConfig& cfg) {
  DdpgConfig c = cfg;
  c.hidden = ckpt.meta_int_list("hidden");
  DdpgAgent agent(static_cast<int>(ckpt.meta("state_dim")),
                  static_cast<int>(ckpt.meta("action_dim")), c, 0);
  agent.load_from(ckpt);
  return agent;
}

}  // namespace ucn
