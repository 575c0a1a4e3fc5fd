#include "ucn/sched.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "ucn/checkpoint.hpp"
#include "ucn/coverage.hpp"
#include "ucn/errors.hpp"
#include "ucn/rng.hpp"

namespace ucn {

const char* to_string(SchedStatus s) {
  switch (s) {
    case SchedStatus::Serve: return "serve";
    case SchedStatus::Charge: return "charge";
    case SchedStatus::Idle: return "idle";
  }
  return "?";
}

double MappingTable::at(int k, int h) const {
  return users[static_cast<std::size_t>(k) * hours + h];
}

void MappingTable::set(int k, int h, double v, const std::string& backend) {
  users[static_cast<std::size_t>(k) * hours + h] = v;
  backends[static_cast<std::size_t>(k) * hours + h] = backend;
}

void MappingTable::enforce_monotone() {
  for (int h = 0; h < hours; ++h)
    for (int k = 1; k <= n_max; ++k)
      if (at(k, h) < at(k - 1, h))
        users[static_cast<std::size_t>(k) * hours + h] = at(k - 1, h);
}

void MappingTable::save_csv(const std::filesystem::path& file) const {
  CsvWriter csv(file, {"k", "hour", "users", "backend"});
  for (int k = 0; k <= n_max; ++k)
    for (int h = 0; h < hours; ++h)
      csv.row({CsvWriter::num(static_cast<int64_t>(k)),
               CsvWriter::num(static_cast<int64_t>(h)), CsvWriter::num(at(k, h)),
               backends[static_cast<std::size_t>(k) * hours + h]});
}

MappingTable MappingTable::load_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open mapping csv: " + file.string());
  std::string line;
  std::getline(in, line);  // header
  struct Row { int k, h; double u; std::string b; };
  std::vector<Row> rows;
  int max_k = 0, max_h = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Row r;
    std::getline(ss, cell, ',');
    r.k = std::stoi(cell);
    std::getline(ss, cell, ',');
    r.h = std::stoi(cell);
    std::getline(ss, cell, ',');
    r.u = std::stod(cell);
    std::getline(ss, r.b, ',');
    max_k = std::max(max_k, r.k);
    max_h = std::max(max_h, r.h);
    rows.push_back(r);
  }
  MappingTable map;
  map.n_max = max_k;
  map.hours = max_h + 1;
  map.users.assign(static_cast<std::size_t>(max_k + 1) * map.hours, 0.0);
  map.backends.assign(static_cast<std::size_t>(max_k + 1) * map.hours, "oracle");
  for (const Row& r : rows) map.set(r.k, r.h, r.u, r.b);
  return map;
}

std::vector<int> hourly_demand(const ExperimentConfig& cfg) {
  std::vector<int> demand;
  demand.reserve(static_cast<std::size_t>(cfg.sched.hours));
  for (int h = 0; h < cfg.sched.hours; ++h) {
    int hod = (cfg.scenario.start_hour + h) % 24;
    double frac = cfg.scenario.users.demand[static_cast<std::size_t>(hod)];
    demand.push_back(static_cast<int>(std::ceil(cfg.scenario.users.total_users * frac)));
  }
  return demand;
}

std::vector<Vec2> mapping_hour_users(const ExperimentConfig& cfg, int hour,
                                     uint64_t mapping_seed) {
  ScenarioConfig sc = cfg.scenario;
  sc.slot_duration = 3600.0;
  sc.slots = std::max(hour + 1, cfg.sched.hours);
  uint64_t seed = mix_seed(mapping_seed, static_cast<uint64_t>(hour));
  WorldState w = init_world(sc, mix_seed(seed, stream_tag("mapping-users")));
  w.clock.slot_index = hour;
  return sample_users(w);
}

namespace {

/// k-means placement of k UAVs over the user sample; returns served count
/// for the best of `restarts` seeded restarts.
double kmeans_served(const std::vector<Vec2>& users, int k,
                     const ExperimentConfig& cfg, uint64_t seed, int restarts) {
  if (k <= 0 || users.empty()) return 0.0;
  const CoverageModel& cov = cfg.scenario.coverage;
  double best = -1.0;
  for (int r = 0; r < restarts; ++r) {
    auto rng = make_rng(mix_seed(seed, stream_tag("kmeans"), static_cast<uint64_t>(r)));
    std::uniform_int_distribution<std::size_t> pick(0, users.size() - 1);
    std::vector<Vec2> centers(static_cast<std::size_t>(k));
    for (auto& c : centers) c = users[pick(rng)];

    std::vector<int> owner(users.size(), 0);
    for (int it = 0; it < 25; ++it) {
      for (std::size_t u = 0; u < users.size(); ++u) {
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d = (users[u] - centers[static_cast<std::size_t>(c)]).norm();
          if (d < bd) {
            bd = d;
            owner[u] = c;
          }
        }
      }
      for (int c = 0; c < k; ++c) {
        Vec2 acc{};
        int n = 0;
        for (std::size_t u = 0; u < users.size(); ++u)
          if (owner[u] == c) {
            acc = acc + users[u];
            ++n;
          }
        centers[static_cast<std::size_t>(c)] =
            n ? Vec2{acc.x / n, acc.y / n} : users[pick(rng)];
      }
    }

    std::vector<ServingUav> uavs;
    for (int c = 0; c < k; ++c)
      uavs.push_back({c, centers[static_cast<std::size_t>(c)], cfg.scenario.h_serve});
    best = std::max(best, static_cast<double>(count_served(users, uavs, cov).total));
  }
  return best;
}

}  // namespace

MappingTable build_mapping(const ExperimentConfig& cfg, MappingBackend backend,
                           uint64_t seed) {
  const int n = cfg.scenario.n_max;
  const int H = cfg.sched.hours;
  MappingTable map;
  map.n_max = n;
  map.hours = H;
  map.users.assign(static_cast<std::size_t>(n + 1) * H, 0.0);
  map.backends.assign(static_cast<std::size_t>(n + 1) * H, "oracle");

  for (int h = 0; h < H; ++h) {
    std::vector<Vec2> users = mapping_hour_users(cfg, h, seed);
    map.set(0, h, 0.0, backend == MappingBackend::Oracle ? "oracle" : "learned");
    for (int k = 1; k <= n; ++k) {
      double u;
      if (backend == MappingBackend::Oracle) {
        u = kmeans_served(users, k, cfg, mix_seed(seed, static_cast<uint64_t>(h),
                                                  static_cast<uint64_t>(k)),
                          cfg.sched.restarts);
        map.set(k, h, u, "oracle");
      } else {
        // per-(k,h) positioning policy, reusing the responsive trainer
        ExperimentConfig cell = cfg;
        cell.scenario.n_max = k;
        cell.scenario.uav_starts.clear();
        cell.scenario.events.clear();
        cell.scenario.slots = 40;
        cell.scenario.slot_duration = 10.0;
        cell.scenario.start_hour = (cfg.scenario.start_hour + h) % 24;
        for (auto& c : cell.scenario.users.clusters) c.velocity = {0.0, 0.0};
        cell.scenario.energy.b_max = 1e9;  // positions only; no quits
        cell.scenario.quit_threshold_frac = 0.0;
        uint64_t cell_seed = mix_seed(seed, stream_tag("cell"),
                                      static_cast<uint64_t>(h), static_cast<uint64_t>(k));
        DdpgAgent agent(global_state_dim(k), 2 * k, cell.ddpg, cell_seed);
        TrainOptions opt;
        opt.episodes = cfg.sched.mapping_episodes;
        opt.workers = 1;
        opt.seed = cell_seed;
        apc_run<PositioningEnv>(
            agent, [&cell](int) { return PositioningEnv(cell); }, opt);
        std::vector<uint64_t> eval_seeds{mix_seed(cell_seed, stream_tag("eval"))};
        EvalReport rep = evaluate_ddpg(agent, cell, eval_seeds);
        u = rep.mean_served;
        map.set(k, h, u, "learned");
      }
    }
  }
  map.enforce_monotone();
  return map;
}

std::vector<int> baseline_min_uavs(const MappingTable& map,
                                   std::span<const int> demand, double p_min) {
  std::vector<int> k_min;
  k_min.reserve(demand.size());
  for (std::size_t h = 0; h < demand.size(); ++h) {
    double need = p_min * demand[h];
    int k = -1;
    for (int c = 0; c <= map.n_max; ++c) {
      if (map.at(c, static_cast<int>(h)) >= need - 1e-9) {
        k = c;
        break;
      }
    }
    if (k < 0)
      throw InfeasibleError("hour " + std::to_string(h) + " infeasible: need " +
                                std::to_string(need) + " users, best " +
                                std::to_string(map.at(map.n_max, static_cast<int>(h))),
                            static_cast<int>(h));
    k_min.push_back(k);
  }
  return k_min;
}

RepairResult relax_and_repair(const RepairInput& in) {
  const int n = static_cast<int>(in.scores.size());
  const EnergyModel& em = *in.energy;
  RepairResult res;
  res.status.assign(static_cast<std::size_t>(n), SchedStatus::Idle);

  // 1. force-charge UAVs that cannot fund one more non-charging hour
  const double serve_floor = em.hover_cost + em.serve_cost +
                             energy_to_charge(in.h_serve, em) + em.reserve();
  const double idle_floor = em.idle_cost + energy_to_charge(0.0, em) + em.reserve();
  std::vector<char> forced(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double b = in.batteries[static_cast<std::size_t>(i)];
    if (b < serve_floor || b < idle_floor) {
      forced[static_cast<std::size_t>(i)] = 1;
      res.status[static_cast<std::size_t>(i)] = SchedStatus::Charge;
    }
  }

  // 2. the k_min highest scorers among the rest serve; ties by lower id
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!forced[static_cast<std::size_t>(i)]) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    return in.scores[static_cast<std::size_t>(a)] > in.scores[static_cast<std::size_t>(b)];
  });
  if (static_cast<int>(rest.size()) < in.k_min) res.shortfall = true;
  int serving = 0;
  std::size_t idx = 0;
  for (; idx < rest.size() && serving < in.k_min; ++idx, ++serving)
    res.status[static_cast<std::size_t>(rest[idx])] = SchedStatus::Serve;

  // 3. remaining: high scorers also serve, low scorers charge, middle idles
  for (; idx < rest.size(); ++idx) {
    int i = rest[idx];
    double score = in.scores[static_cast<std::size_t>(i)];
    if (score >= in.theta_serve) {
      res.status[static_cast<std::size_t>(i)] = SchedStatus::Serve;
    } else if (score < in.theta_charge) {
      res.status[static_cast<std::size_t>(i)] = SchedStatus::Charge;
    } else {
      res.status[static_cast<std::size_t>(i)] = SchedStatus::Idle;
    }
  }
  return res;
}

double scheduler_reward(int served, int demand, double battery_sum, int n_uavs,
                        double b_max, int hour, int horizon, double coeff,
                        bool violation) {
  double r = 0.0;
  if (demand > 0) r += (1.0 - coeff) * static_cast<double>(served) / demand;
  if (hour == horizon - 1) r += coeff * battery_sum / (n_uavs * b_max);
  if (violation) r -= 1.0;
  return r;
}

SchedulerEnv::SchedulerEnv(const ExperimentConfig& cfg, const MappingTable& map)
    : cfg_(cfg), map_(map), n_(cfg.scenario.n_max), horizon_(cfg.sched.hours) {
  if (map_.n_max < n_ || map_.hours < horizon_)
    throw ConfigError("mapping table smaller than the scenario: need " +
                      std::to_string(n_) + " UAVs x " + std::to_string(horizon_) +
                      " hours, found " + std::to_string(map_.n_max) + " x " +
                      std::to_string(map_.hours));
  demand_ = hourly_demand(cfg_);
  k_min_ = baseline_min_uavs(map_, demand_, cfg_.sched.p_min);
  reset(0);
}

void SchedulerEnv::reset(uint64_t) {
  battery_.assign(static_cast<std::size_t>(n_),
                  cfg_.scenario.initial_battery_frac * cfg_.scenario.energy.b_max);
  status_.assign(static_cast<std::size_t>(n_), SchedStatus::Idle);
  hour_ = 0;
  violations_ = 0;
}

double SchedulerEnv::altitude_of(SchedStatus s) const {
  switch (s) {
    case SchedStatus::Serve: return cfg_.scenario.h_serve;
    case SchedStatus::Charge: return cfg_.scenario.energy.cloud_top;
    case SchedStatus::Idle: return 0.0;
  }
  return 0.0;
}

std::vector<double> SchedulerEnv::state() const {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(state_dim()));
  const double b_max = cfg_.scenario.energy.b_max;
  for (int i = 0; i < n_; ++i) s.push_back(battery_[static_cast<std::size_t>(i)] / b_max);
  for (int i = 0; i < n_; ++i) {
    SchedStatus st = status_[static_cast<std::size_t>(i)];
    s.push_back(st == SchedStatus::Serve ? 1.0 : 0.0);
    s.push_back(st == SchedStatus::Charge ? 1.0 : 0.0);
    s.push_back(st == SchedStatus::Idle ? 1.0 : 0.0);
  }
  s.push_back(static_cast<double>(hour_) / horizon_);
  return s;
}

SchedulerEnv::Step SchedulerEnv::step(std::span<const double> action) {
  std::vector<double> scores(action.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    scores[i] = 0.5 * (std::clamp(action[i], -1.0, 1.0) + 1.0);
  return step_scores(scores);
}

SchedulerEnv::Step SchedulerEnv::step_scores(std::span<const double> scores) {
  RepairInput in;
  in.scores = scores;
  in.batteries = battery_;
  in.prev_status = status_;
  in.k_min = k_min_[static_cast<std::size_t>(hour_)];
  in.h_serve = cfg_.scenario.h_serve;
  in.theta_charge = cfg_.sched.theta_charge;
  in.theta_serve = cfg_.sched.theta_serve;
  in.energy = &cfg_.scenario.energy;
  RepairResult rep = relax_and_repair(in);
  Step out = step_statuses(rep.status);
  if (rep.shortfall && !out.violation) {
    // not enough sustainable UAVs to fill the service floor
    out.violation = true;
    out.reward -= 1.0;
    out.terminal = true;
    ++violations_;
  }
  return out;
}

SchedulerEnv::Step SchedulerEnv::step_statuses(
    std::span<const SchedStatus> statuses) {
  if (static_cast<int>(statuses.size()) != n_)
    throw ConfigError("scheduler step: expected " + std::to_string(n_) +
                      " statuses, found " + std::to_string(statuses.size()));
  const EnergyModel& em = cfg_.scenario.energy;
  const int h = hour_;
  const double hod = std::fmod(cfg_.scenario.start_hour + h, 24.0);

  Step out;
  out.status.assign(statuses.begin(), statuses.end());
  out.demand = demand_[static_cast<std::size_t>(h)];

  int k_serve = 0;
  for (SchedStatus s : statuses) k_serve += s == SchedStatus::Serve;
  out.served = static_cast<int>(std::min<double>(
      map_.at(std::min(k_serve, map_.n_max), h), out.demand));

  for (int i = 0; i < n_; ++i) {
    SchedStatus st = statuses[static_cast<std::size_t>(i)];
    double& b = battery_[static_cast<std::size_t>(i)];
    // ascent to the charging altitude is paid once, at the switch
    if (st == SchedStatus::Charge && status_[static_cast<std::size_t>(i)] != SchedStatus::Charge)
      b = std::max(0.0, b - energy_to_charge(altitude_of(status_[static_cast<std::size_t>(i)]), em));
    Uav u;
    u.battery = b;
    u.position.z = altitude_of(st);
    u.status = st == SchedStatus::Serve ? UavStatus::Serving
               : st == SchedStatus::Charge ? UavStatus::Charging
                                           : UavStatus::Idle;
    b = step_battery(u, 0.0, em, hod);
  }

  // feasibility: service floor and hour-boundary sustainability
  bool violation = false;
  double need = cfg_.sched.p_min * out.demand;
  if (out.served + 1e-9 < need) violation = true;
  for (int i = 0; i < n_; ++i) {
    Uav u;
    u.battery = battery_[static_cast<std::size_t>(i)];
    u.position.z = altitude_of(statuses[static_cast<std::size_t>(i)]);
    if (!is_sustainable(u, em)) violation = true;
  }

  status_.assign(statuses.begin(), statuses.end());
  double bsum = std::accumulate(battery_.begin(), battery_.end(), 0.0);
  out.reward = scheduler_reward(out.served, out.demand, bsum, n_, em.b_max, h,
                                horizon_, cfg_.sched.coeff, violation);
  out.violation = violation;
  if (violation) ++violations_;
  hour_ = h + 1;
  out.terminal = violation || hour_ >= horizon_;
  return out;
}

SchedulerTrainResult train_scheduler(DdpgAgent& agent,
                                     const ExperimentConfig& cfg,
                                     const MappingTable& map,
                                     const TrainOptions& opt) {
  // surfaces InfeasibleError on the caller thread before workers start
  SchedulerEnv probe(cfg, map);

  SchedulerTrainResult res;
  auto run = apc_run<SchedulerEnv>(
      agent, [&](int) { return SchedulerEnv(cfg, map); }, opt);
  res.curve = std::move(run.curve);

  ChargeProfile final = rollout_profile(agent, cfg, map);
  res.final_objective = final.objective;
  res.final_violations = final.violations;
  return res;
}

SchedStatus ChargeProfile::at(int uav, int hour) const {
  return status[static_cast<std::size_t>(uav) * hours + hour];
}

void ChargeProfile::save_csv(const std::filesystem::path& file) const {
  CsvWriter csv(file, {"uav", "hour", "status", "battery"});
  for (int i = 0; i < n_uavs; ++i)
    for (int h = 0; h < hours; ++h)
      csv.row({CsvWriter::num(static_cast<int64_t>(i)),
               CsvWriter::num(static_cast<int64_t>(h)),
               to_string(status[static_cast<std::size_t>(i) * hours + h]),
               CsvWriter::num(battery[static_cast<std::size_t>(i) * hours + h])});
}

namespace {

/// pick(h) supplies either statuses directly or via the policy path.
ChargeProfile run_profile(SchedulerEnv& env,
                          const std::function<SchedulerEnv::Step(int)>& act) {
  const int n = env.n_uavs();
  const int H = env.hours();
  ChargeProfile prof;
  prof.n_uavs = n;
  prof.hours = H;
  prof.status.assign(static_cast<std::size_t>(n) * H, SchedStatus::Idle);
  prof.battery.assign(static_cast<std::size_t>(n) * H, 0.0);

  env.reset(0);
  for (int h = 0; h < H; ++h) {
    SchedulerEnv::Step step = act(h);
    for (int i = 0; i < n; ++i) {
      prof.status[static_cast<std::size_t>(i) * H + h] = step.status[static_cast<std::size_t>(i)];
      prof.battery[static_cast<std::size_t>(i) * H + h] = env.batteries()[static_cast<std::size_t>(i)];
    }
    prof.objective += step.reward;
    prof.total_served += step.served;
    prof.violations += step.violation ? 1 : 0;
    if (step.terminal) break;
  }
  prof.final_energy =
      std::accumulate(env.batteries().begin(), env.batteries().end(), 0.0);
  return prof;
}

}  // namespace

ChargeProfile rollout_profile(const DdpgAgent& agent,
                              const ExperimentConfig& cfg,
                              const MappingTable& map) {
  SchedulerEnv env(cfg, map);
  return run_profile(env, [&](int) {
    std::vector<double> a = agent.act(env.state(), 0.0, nullptr);
    return env.step(a);
  });
}

ChargeProfile rollout_fixed(const ExperimentConfig& cfg, const MappingTable& map,
                            std::span<const SchedStatus> profile) {
  SchedulerEnv env(cfg, map);
  const int n = env.n_uavs();
  const int H = env.hours();
  if (static_cast<int>(profile.size()) != n * H)
    throw ConfigError("profile size mismatch");
  return run_profile(env, [&, n, H](int h) {
    std::vector<SchedStatus> statuses(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      statuses[static_cast<std::size_t>(i)] = profile[static_cast<std::size_t>(i) * H + h];
    return env.step_statuses(statuses);
  });
}

EnumerateResult enumerate_optimal(const ExperimentConfig& cfg,
                                  const MappingTable& map, double coeff) {
  ExperimentConfig c = cfg;
  c.sched.coeff = coeff;
  const int n = c.scenario.n_max;
  const int H = c.sched.hours;
  const int cells = n * H;
  double total = std::pow(3.0, cells);
  if (total > 1e6)
    throw EnumerationTooLarge(
        "instance too large: 3^(" + std::to_string(n) + "*" + std::to_string(H) +
        ") = " + std::to_string(total) + " profiles exceeds 1e6");

  SchedulerEnv env(c, map);
  std::vector<SchedStatus> trits(static_cast<std::size_t>(cells), SchedStatus::Serve);
  std::vector<SchedStatus> statuses(static_cast<std::size_t>(n));

  EnumerateResult res;
  res.best.objective = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<uint64_t>(total);
  for (uint64_t code = 0; code < count; ++code) {
    uint64_t rem = code;
    for (int i = 0; i < cells; ++i) {
      trits[static_cast<std::size_t>(i)] = static_cast<SchedStatus>(rem % 3);
      rem /= 3;
    }
    env.reset(0);
    double objective = 0.0;
    for (int h = 0; h < H; ++h) {
      for (int i = 0; i < n; ++i)
        statuses[static_cast<std::size_t>(i)] = trits[static_cast<std::size_t>(i * H + h)];
      auto step = env.step_statuses(statuses);
      objective += step.reward;
      if (step.terminal) break;
    }
    ++res.profiles;
    if (objective > res.best.objective) {
      ChargeProfile prof = rollout_fixed(c, map, trits);
      res.best = prof;
    }
  }
  return res;
}

Checkpoint make_scheduler_checkpoint(const DdpgAgent& agent,
                                     const ExperimentConfig& cfg,
                                     const MappingTable& map) {
  Checkpoint ckpt;
  ckpt.kind = "scheduler";
  ckpt.meta_int["state_dim"] = agent.state_dim();
  ckpt.meta_int["action_dim"] = agent.action_dim();
  ckpt.meta_int["n_max"] = cfg.scenario.n_max;
  ckpt.meta_int["hours"] = cfg.sched.hours;
  ckpt.meta_int["map_n_max"] = map.n_max;
  ckpt.meta_int["map_hours"] = map.hours;
  ckpt.meta_int["seed"] = static_cast<int64_t>(cfg.run.seed);
  ckpt.set_meta_int_list("hidden", cfg.ddpg.hidden);
  agent.save_into(ckpt);
  TensorEntry t;
  t.name = "mapping.users";
  t.shape = {map.n_max + 1, map.hours};
  t.data = map.users;
  ckpt.tensors.push_back(std::move(t));
  return ckpt;
}

MappingTable mapping_from_checkpoint(const Checkpoint& ckpt) {
  MappingTable map;
  map.n_max = static_cast<int>(ckpt.meta("map_n_max"));
  map.hours = static_cast<int>(ckpt.meta("map_hours"));
  map.users = ckpt.tensor("mapping.users").data;
  map.backends.assign(map.users.size(), "oracle");
  return map;
}

}  // namespace ucn
