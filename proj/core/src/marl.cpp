#include "ucn/marl.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "ucn/checkpoint.hpp"
#include "ucn/errors.hpp"
#include "ucn/rng.hpp"

namespace ucn {

int local_state_dim(int n_max) { return 2 + n_max + 1; }

std::vector<double> encode_local_state(const WorldState& w, int uav_id) {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(local_state_dim(static_cast<int>(w.uavs.size()))));
  const Uav& self = w.uavs[static_cast<std::size_t>(uav_id)];
  s.push_back(self.position.x / w.region.width);
  s.push_back(self.position.y / w.region.height);
  for (const Uav& u : w.uavs)
    s.push_back(u.status == UavStatus::Serving ? 1.0 : 0.0);
  s.push_back(w.clock.slot_index / static_cast<double>(w.clock.slots_per_episode));
  return s;
}

std::vector<Vec2> discrete_actions(double delta) {
  std::vector<Vec2> acts;
  acts.reserve(kNumDiscreteActions);
  acts.push_back({0.0, 0.0});
  for (int k = 0; k < 8; ++k) {
    double phi = k * M_PI / 4.0;
    acts.push_back({delta * std::cos(phi), delta * std::sin(phi)});
  }
  return acts;
}

double local_reward(int served_total, int total_users, double overlap_sum,
                    double footprint_r, double lambda) {
  double service = total_users > 0 ? static_cast<double>(served_total) / total_users : 0.0;
  double footprint = M_PI * footprint_r * footprint_r;
  return service - lambda * overlap_sum / footprint;
}

DqnAgent::DqnAgent(int state_dim, const DqnConfig& cfg, uint64_t seed)
    : cfg_(cfg), buffer_(static_cast<std::size_t>(cfg.buffer_capacity)) {
  std::vector<int> sizes{state_dim};
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(kNumDiscreteActions);
  q_ = Mlp(sizes, OutputActivation::Identity);
  q_.init_uniform_fanin(mix_seed(seed, stream_tag("dqn")));
  target_ = q_;
  opt_ = Adam(q_.param_count(), cfg.lr);
  grad_.resize(q_.param_count());
}

int DqnAgent::act(std::span<const double> state, double eps,
                  std::mt19937_64& rng) const {
  if (eps > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < eps) {
      std::uniform_int_distribution<int> pick(0, kNumDiscreteActions - 1);
      return pick(rng);
    }
  }
  std::vector<double> q = q_.forward(state);
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

TrainDiag DqnAgent::q_update(std::mt19937_64& rng) {
  TrainDiag diag;
  auto batch_opt = buffer_.sample(static_cast<std::size_t>(cfg_.batch), rng);
  if (!batch_opt) return diag;
  const auto& batch = *batch_opt;
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  std::fill(grad_.begin(), grad_.end(), 0.0);
  double loss = 0.0;
  double tsum = 0.0;
  std::vector<double> upstream(static_cast<std::size_t>(kNumDiscreteActions));
  for (const DiscreteTransition& t : batch) {
    double y = t.reward;
    if (!t.terminal) {
      std::vector<double> q2 = target_.forward(t.next_state);
      y += cfg_.gamma * *std::max_element(q2.begin(), q2.end());
    }
    tsum += y;
    q_.forward(t.state, tape_);
    double q = tape_.act.back()[static_cast<std::size_t>(t.action)];
    double err = q - y;
    loss += err * err * inv_b;
    std::fill(upstream.begin(), upstream.end(), 0.0);
    upstream[static_cast<std::size_t>(t.action)] = 2.0 * err * inv_b;
    q_.backward(tape_, upstream, grad_);
  }
  opt_.step(q_.params(), grad_);
  soft_update(target_, q_, cfg_.tau);

  diag.ready = true;
  diag.critic_loss = loss;
  diag.mean_target = tsum * inv_b;
  return diag;
}

QuitSchedule random_quit_schedule(int n_max, int slots, std::mt19937_64& rng) {
  if (n_max < 1) throw ConfigError("quit schedule needs n_max >= 1");
  QuitSchedule sched;
  sched.order.resize(static_cast<std::size_t>(n_max));
  std::iota(sched.order.begin(), sched.order.end(), 0);
  std::shuffle(sched.order.begin(), sched.order.end(), rng);

  // n_max - 1 distinct quit slots in [1, slots-1], increasing
  int quits = n_max - 1;
  if (quits == 0) return sched;
  if (slots - 1 < quits)
    throw ConfigError("episode too short for the quit schedule");
  std::vector<int> candidates(static_cast<std::size_t>(slots - 1));
  std::iota(candidates.begin(), candidates.end(), 1);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(static_cast<std::size_t>(quits));
  std::sort(candidates.begin(), candidates.end());
  for (int q = 0; q < quits; ++q)
    sched.quits.emplace_back(candidates[static_cast<std::size_t>(q)],
                             sched.order[static_cast<std::size_t>(q)]);
  return sched;
}

MarlTrainer::MarlTrainer(const ExperimentConfig& cfg, uint64_t seed)
    : cfg_(cfg), rng_(make_rng(mix_seed(seed, stream_tag("marl")))), seed_(seed) {
  const int n = cfg.scenario.n_max;
  agents_.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id)
    agents_.push_back(std::make_unique<DqnAgent>(
        local_state_dim(n), cfg.dqn,
        mix_seed(seed, stream_tag("agent"), static_cast<uint64_t>(id))));
}

double MarlTrainer::epsilon(int episode, int total_episodes) const {
  const DqnConfig& c = cfg_.dqn;
  double span = c.eps_decay_frac * total_episodes;
  if (span <= 0) return c.eps_end;
  double f = std::min(1.0, episode / span);
  return c.eps_start + f * (c.eps_end - c.eps_start);
}

namespace {

struct CopyObs {
  int served = 0;
  int total_users = 0;
  std::vector<double> overlap_sum;  // per uav id
};

CopyObs observe_copy(const WorldState& w, const CoverageModel& cov) {
  CopyObs obs;
  obs.overlap_sum.assign(w.uavs.size(), 0.0);
  std::vector<Vec2> users = sample_users(w);
  std::vector<ServingUav> serving;
  for (const Uav& u : w.uavs)
    if (u.status == UavStatus::Serving)
      serving.push_back({u.id, u.position.ground(), u.position.z});
  obs.served = count_served(users, serving, cov).total;
  obs.total_users = static_cast<int>(users.size());
  for (std::size_t a = 0; a < serving.size(); ++a) {
    double ra = footprint_radius(serving[a].altitude, cov);
    for (std::size_t b = 0; b < serving.size(); ++b) {
      if (a == b) continue;
      double rb = footprint_radius(serving[b].altitude, cov);
      obs.overlap_sum[static_cast<std::size_t>(serving[a].id)] +=
          overlap_area(serving[a].ground, ra, serving[b].ground, rb);
    }
  }
  return obs;
}

}  // namespace

DualEpisodeResult MarlTrainer::run_dual_episode(const QuitSchedule& schedule,
                                                double eps, bool train) {
  const int n = cfg_.scenario.n_max;
  for (const auto& [slot, id] : schedule.quits)
    if (id < 0 || id >= n)
      throw ConfigError("quit schedule references unknown UAV " + std::to_string(id));

  ScenarioConfig sc_a = cfg_.scenario;
  sc_a.events.clear();
  for (const auto& [slot, id] : schedule.quits) {
    CrewEvent e;
    e.kind = CrewEventKind::Quit;
    e.uav_id = id;
    e.slot = slot;
    sc_a.events.push_back(e);
  }
  ScenarioConfig sc_b = cfg_.scenario;
  sc_b.events.clear();

  uint64_t ep_seed = rng_();
  WorldState a = init_world(sc_a, mix_seed(ep_seed, stream_tag("A")));
  WorldState b = init_world(sc_b, mix_seed(ep_seed, stream_tag("B")));
  for (Uav& u : b.uavs) u.status = UavStatus::Away;  // B starts empty

  const std::vector<Vec2> acts = discrete_actions(cfg_.dqn.delta);
  const double r_serve = footprint_radius(cfg_.scenario.h_serve, cfg_.scenario.coverage);
  const int T = cfg_.scenario.slots;

  DualEpisodeResult res;
  res.quit_order = schedule.order;
  res.pushes_a.assign(static_cast<std::size_t>(n), 0);
  res.pushes_b.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> returns(static_cast<std::size_t>(n), 0.0);

  struct Pending {
    int id;
    std::vector<double> state;
    int action;
  };

  for (int t = 0; t < T; ++t) {
    // actions from both copies' active agents
    std::vector<Pending> pend_a, pend_b;
    std::vector<Vec2> moves_a(static_cast<std::size_t>(n)), moves_b(static_cast<std::size_t>(n));
    for (int id = 0; id < n; ++id) {
      if (a.uavs[static_cast<std::size_t>(id)].status == UavStatus::Serving) {
        std::vector<double> s = encode_local_state(a, id);
        int act = agents_[static_cast<std::size_t>(id)]->act(s, eps, rng_);
        moves_a[static_cast<std::size_t>(id)] = acts[static_cast<std::size_t>(act)];
        pend_a.push_back({id, std::move(s), act});
      }
      if (b.uavs[static_cast<std::size_t>(id)].status == UavStatus::Serving) {
        std::vector<double> s = encode_local_state(b, id);
        int act = agents_[static_cast<std::size_t>(id)]->act(s, eps, rng_);
        moves_b[static_cast<std::size_t>(id)] = acts[static_cast<std::size_t>(act)];
        pend_b.push_back({id, std::move(s), act});
      }
    }

    StepInfo info_a = advance_slot(a, moves_a);
    advance_slot(b, moves_b);

    // slot-boundary hand-off: a quit from A joins B at the same position
    for (int id : info_a.quits) {
      Uav& u = b.uavs[static_cast<std::size_t>(id)];
      u.status = UavStatus::Serving;
      u.position = a.uavs[static_cast<std::size_t>(id)].position;
      u.position.z = cfg_.scenario.h_serve;
      u.battery = a.uavs[static_cast<std::size_t>(id)].battery;
    }

    // partition invariant: active(A) and active(B) split the full id set
    for (int id = 0; id < n; ++id) {
      bool in_a = a.uavs[static_cast<std::size_t>(id)].status == UavStatus::Serving;
      bool in_b = b.uavs[static_cast<std::size_t>(id)].status == UavStatus::Serving;
      if (in_a == in_b) res.partition_ok = false;
    }

    CopyObs obs_a = observe_copy(a, cfg_.scenario.coverage);
    CopyObs obs_b = observe_copy(b, cfg_.scenario.coverage);
    bool last = t + 1 >= T;

    for (const Pending& p : pend_a) {
      bool quit_now = std::find(info_a.quits.begin(), info_a.quits.end(), p.id) !=
                      info_a.quits.end();
      double r = local_reward(obs_a.served, std::max(1, obs_a.total_users),
                              obs_a.overlap_sum[static_cast<std::size_t>(p.id)], r_serve,
                              cfg_.dqn.lambda);
      returns[static_cast<std::size_t>(p.id)] += r;
      // the A stream of a quitting agent ends here; it resumes in B
      agents_[static_cast<std::size_t>(p.id)]->push(
          {p.state, p.action, r, encode_local_state(a, p.id), last || quit_now});
      ++res.pushes_a[static_cast<std::size_t>(p.id)];
    }
    for (const Pending& p : pend_b) {
      double r = local_reward(obs_b.served, std::max(1, obs_b.total_users),
                              obs_b.overlap_sum[static_cast<std::size_t>(p.id)], r_serve,
                              cfg_.dqn.lambda);
      returns[static_cast<std::size_t>(p.id)] += r;
      agents_[static_cast<std::size_t>(p.id)]->push(
          {p.state, p.action, r, encode_local_state(b, p.id), last});
      ++res.pushes_b[static_cast<std::size_t>(p.id)];
    }

    if (train) {
      const auto warmup =
          static_cast<std::size_t>(std::max(cfg_.dqn.warmup, cfg_.dqn.batch));
      for (int id = 0; id < n; ++id) {
        DqnAgent& agent = *agents_[static_cast<std::size_t>(id)];
        if (agent.buffer().size() < warmup) continue;
        TrainDiag d = agent.q_update(rng_);
        if (d.ready) {
          res.mean_loss += d.critic_loss;
          ++res.updates;
        }
      }
    }
  }

  if (res.updates) res.mean_loss /= static_cast<double>(res.updates);
  res.mean_return = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  return res;
}

std::vector<CurvePoint> MarlTrainer::train(int episodes) {
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    QuitSchedule sched = random_quit_schedule(cfg_.scenario.n_max,
                                              cfg_.scenario.slots, rng_);
    double eps = epsilon(episodes_run_, episodes);
    DualEpisodeResult r = run_dual_episode(sched, eps, true);
    curve.push_back({episodes_run_, r.mean_return, r.mean_loss});
    ++episodes_run_;
  }
  return curve;
}

Checkpoint MarlTrainer::make_checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = "marl";
  const int n = cfg_.scenario.n_max;
  ckpt.meta_int["n_agents"] = n;
  ckpt.meta_int["state_dim"] = local_state_dim(n);
  ckpt.meta_int["n_actions"] = kNumDiscreteActions;
  ckpt.meta_int["seed"] = static_cast<int64_t>(seed_);
  ckpt.set_meta_int_list("hidden", cfg_.dqn.hidden);
  for (int id = 0; id < n; ++id) {
    const DqnAgent& ag = *agents_[static_cast<std::size_t>(id)];
    TensorEntry q;
    q.name = "agent" + std::to_string(id) + ".q";
    q.shape = {static_cast<int64_t>(ag.q_net().param_count())};
    q.data.assign(ag.q_net().params().begin(), ag.q_net().params().end());
    ckpt.tensors.push_back(std::move(q));
  }
  return ckpt;
}

void MarlTrainer::load_checkpoint_into(const Checkpoint& ckpt) {
  const int n = cfg_.scenario.n_max;
  if (ckpt.meta("n_agents") != n)
    throw CheckpointError("checkpoint holds " + std::to_string(ckpt.meta("n_agents")) +
                          " agents, scenario needs " + std::to_string(n));
  if (ckpt.meta("state_dim") != local_state_dim(n))
    throw CheckpointError("checkpoint state_dim " + std::to_string(ckpt.meta("state_dim")) +
                          ", scenario encoding needs " +
                          std::to_string(local_state_dim(n)));
  for (int id = 0; id < n; ++id) {
    DqnAgent& ag = *agents_[static_cast<std::size_t>(id)];
    const TensorEntry& t = ckpt.tensor("agent" + std::to_string(id) + ".q");
    if (t.data.size() != ag.q_net().param_count())
      throw CheckpointError("agent tensor size mismatch");
    std::copy(t.data.begin(), t.data.end(), ag.q_net().params().begin());
    std::copy(t.data.begin(), t.data.end(), ag.target_net().params().begin());
  }
}

EvalReport evaluate_marl(const MarlTrainer& trainer, const ExperimentConfig& cfg,
                         std::span<const uint64_t> seeds,
                         const EvalOptions& opts) {
  EvalReport report;
  const int n = cfg.scenario.n_max;
  const int window = 10;
  const std::vector<Vec2> acts = discrete_actions(cfg.dqn.delta);
  auto greedy_rng = make_rng(0);  // unused at eps = 0

  for (uint64_t seed : seeds) {
    WorldState w = init_world(cfg.scenario, seed);
    std::unique_ptr<TraceWriter> trace;
    if (!opts.trace_prefix.empty())
      trace = std::make_unique<TraceWriter>(
          opts.trace_prefix.string() + "_seed" + std::to_string(seed) + ".jsonl", "A");

    EvalRun run;
    run.seed = seed;
    bool frozen = false;
    std::vector<int> event_slots;
    std::vector<std::string> event_kinds;
    std::vector<int> event_ids;

    for (int t = 0; t < cfg.scenario.slots; ++t) {
      std::vector<Vec2> moves(static_cast<std::size_t>(n));
      if (!frozen) {
        for (int id = 0; id < n; ++id) {
          if (w.uavs[static_cast<std::size_t>(id)].status != UavStatus::Serving) continue;
          std::vector<double> s = encode_local_state(w, id);
          int act = trainer.agent(id).act(s, 0.0, greedy_rng);
          moves[static_cast<std::size_t>(id)] = acts[static_cast<std::size_t>(act)];
        }
      }
      StepInfo info = advance_slot(w, moves);
      CopyObs obs = observe_copy(w, cfg.scenario.coverage);
      run.served_per_slot.push_back(obs.served);
      for (int id : info.quits) {
        event_slots.push_back(t);
        event_kinds.push_back("quit");
        event_ids.push_back(id);
      }
      for (int id : info.joined) {
        event_slots.push_back(t);
        event_kinds.push_back("join");
        event_ids.push_back(id);
      }
      if (!info.events_fired.empty() && opts.freeze_after_event) frozen = true;
      if (trace) trace->slot_record(w, obs.served, info.events_fired);
    }

    const auto& sv = run.served_per_slot;
    double sum = std::accumulate(sv.begin(), sv.end(), 0.0);
    run.mean_served = sv.empty() ? 0.0 : sum / static_cast<double>(sv.size());
    for (std::size_t e = 0; e < event_slots.size(); ++e) {
      EventWindow wdw;
      wdw.slot = event_slots[e];
      wdw.kind = event_kinds[e];
      wdw.uav_id = event_ids[e];
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

}  // namespace ucn
