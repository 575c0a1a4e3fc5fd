#include "ucn/config.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>

#include "ucn/checkpoint.hpp"
#include "ucn/errors.hpp"

namespace ucn {

namespace {

// Default day demand curve: morning and evening peaks, 03:00 trough.
constexpr std::array<double, 24> kDefaultDemand = {
    0.35, 0.25, 0.18, 0.15, 0.18, 0.25, 0.40, 0.60, 0.80, 0.90, 0.85, 0.75,
    0.65, 0.60, 0.60, 0.65, 0.70, 0.80, 0.85, 0.95, 1.00, 0.90, 0.70, 0.50};

struct RawValue {
  enum class Kind { Int, Real, Bool, Str, Arr };
  Kind kind = Kind::Int;
  long long i = 0;
  double d = 0.0;
  bool b = false;
  std::string s;
  std::vector<double> arr;
  int line = 0;
};

struct RawTable {
  std::map<std::string, RawValue> values;
  int line = 0;
};

struct RawDoc {
  // plain sections: one table; array sections ([[...]]): one per occurrence
  std::map<std::string, RawTable> sections;
  std::map<std::string, std::vector<RawTable>> arrays;
  std::string source;
};

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

RawValue parse_value(const std::string& text, const std::string& source, int line) {
  RawValue v;
  v.line = line;
  std::string t = trim(text);
  if (t.empty()) fail(source, line, "missing value");
  if (t == "true" || t == "false") {
    v.kind = RawValue::Kind::Bool;
    v.b = t == "true";
    return v;
  }
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') fail(source, line, "unterminated string");
    v.kind = RawValue::Kind::Str;
    v.s = t.substr(1, t.size() - 2);
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') fail(source, line, "unterminated array");
    v.kind = RawValue::Kind::Arr;
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      char* end = nullptr;
      double d = std::strtod(item.c_str(), &end);
      if (end == item.c_str() || *end != '\0')
        fail(source, line, "bad array element '" + item + "'");
      v.arr.push_back(d);
    }
    return v;
  }
  // number: integer when it scans cleanly without . e E
  bool looks_int = t.find_first_of(".eE") == std::string::npos;
  char* end = nullptr;
  if (looks_int) {
    long long i = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() && *end == '\0') {
      v.kind = RawValue::Kind::Int;
      v.i = i;
      return v;
    }
  }
  double d = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    fail(source, line, "cannot parse value '" + t + "'");
  v.kind = RawValue::Kind::Real;
  v.d = d;
  return v;
}

const std::array<const char*, 3> kArraySections = {"cluster", "event", "uav"};

bool is_array_section(const std::string& name) {
  for (const char* s : kArraySections)
    if (name == s) return true;
  return false;
}

RawDoc parse_raw(const std::string& text, const std::string& source) {
  RawDoc doc;
  doc.source = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  RawTable* current = nullptr;
  std::string current_name;

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(strip_comment(line));
    if (t.empty()) continue;

    if (t.front() == '[') {
      bool arr = t.size() > 1 && t[1] == '[';
      std::string close = arr ? "]]" : "]";
      if (t.substr(t.size() - close.size()) != close)
        fail(source, lineno, "malformed section header");
      std::string name = trim(t.substr(arr ? 2 : 1, t.size() - 2 * close.size()));
      if (name.empty()) fail(source, lineno, "empty section name");
      if (arr != is_array_section(name))
        fail(source, lineno, arr ? "unknown table array [[" + name + "]]"
                                 : "section [" + name + "] must use [[" + name + "]]");
      if (arr) {
        doc.arrays[name].push_back(RawTable{{}, lineno});
        current = &doc.arrays[name].back();
      } else {
        current = &doc.sections[name];
        current->line = lineno;
      }
      current_name = name;
      continue;
    }

    std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(source, lineno, "expected key = value");
    if (!current) fail(source, lineno, "key outside of any [section]");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(source, lineno, "empty key");

    // arrays may span lines until the bracket closes
    if (!value.empty() && value.front() == '[' && value.find(']') == std::string::npos) {
      std::string more;
      while (value.find(']') == std::string::npos && std::getline(in, more)) {
        ++lineno;
        value += " " + trim(strip_comment(more));
      }
    }
    if (current->values.count(key))
      fail(source, lineno, "duplicate key '" + key + "' in [" + current_name + "]");
    current->values[key] = parse_value(value, source, lineno);
  }
  return doc;
}

/// Take-and-consume view over one raw table; leftovers are unknown keys.
class Reader {
 public:
  Reader(RawTable& table, std::string section, std::string source)
      : t_(table), section_(std::move(section)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return t_.values.count(key) > 0; }

  void take(const std::string& key, double& out) {
    if (auto* v = get(key)) out = as_double(*v, key);
  }
  void take(const std::string& key, int& out) {
    if (auto* v = get(key)) out = static_cast<int>(as_int(*v, key));
  }
  void take(const std::string& key, uint64_t& out) {
    if (auto* v = get(key)) out = static_cast<uint64_t>(as_int(*v, key));
  }
  void take(const std::string& key, bool& out) {
    if (auto* v = get(key)) {
      if (v->kind != RawValue::Kind::Bool)
        fail(source_, v->line, "'" + key + "' must be true/false");
      out = v->b;
    }
  }
  void take(const std::string& key, std::string& out) {
    if (auto* v = get(key)) {
      if (v->kind != RawValue::Kind::Str)
        fail(source_, v->line, "'" + key + "' must be a quoted string");
      out = v->s;
    }
  }
  void take(const std::string& key, std::vector<double>& out) {
    if (auto* v = get(key)) {
      if (v->kind != RawValue::Kind::Arr)
        fail(source_, v->line, "'" + key + "' must be an array");
      out = v->arr;
    }
  }
  void take(const std::string& key, std::vector<int>& out) {
    std::vector<double> tmp;
    bool had = has(key);
    take(key, tmp);
    if (!had) return;
    out.clear();
    for (double d : tmp) out.push_back(static_cast<int>(std::llround(d)));
  }
  void take(const std::string& key, std::array<double, 24>& out) {
    if (auto* v = get(key)) {
      if (v->kind != RawValue::Kind::Arr || v->arr.size() != 24)
        fail(source_, v->line, "'" + key + "' must be an array of 24 values");
      std::copy(v->arr.begin(), v->arr.end(), out.begin());
    }
  }

  void finish() {
    for (auto& [key, v] : t_.values)
      if (!consumed_.count(key))
        fail(source_, v.line, "unknown key '" + key + "' in [" + section_ + "]");
  }

 private:
  RawValue* get(const std::string& key) {
    auto it = t_.values.find(key);
    if (it == t_.values.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }
  double as_double(const RawValue& v, const std::string& key) const {
    if (v.kind == RawValue::Kind::Real) return v.d;
    if (v.kind == RawValue::Kind::Int) return static_cast<double>(v.i);
    fail(source_, v.line, "'" + key + "' must be a number");
  }
  long long as_int(const RawValue& v, const std::string& key) const {
    if (v.kind == RawValue::Kind::Int) return v.i;
    if (v.kind == RawValue::Kind::Real && v.d == std::floor(v.d))
      return static_cast<long long>(v.d);
    fail(source_, v.line, "'" + key + "' must be an integer");
  }

  RawTable& t_;
  std::string section_;
  std::string source_;
  std::set<std::string> consumed_;
};

void apply_doc(RawDoc& doc, ExperimentConfig& cfg) {
  const std::string& src = doc.source;
  ScenarioConfig& sc = cfg.scenario;

  for (auto& [name, table] : doc.sections) {
    Reader r(table, name, src);
    if (name == "region") {
      r.take("width", sc.region.width);
      r.take("height", sc.region.height);
    } else if (name == "clock") {
      r.take("slots", sc.slots);
      r.take("slot_duration", sc.slot_duration);
      r.take("start_hour", sc.start_hour);
    } else if (name == "crew") {
      r.take("n_max", sc.n_max);
      r.take("d_max", sc.d_max);
      r.take("h_serve", sc.h_serve);
      r.take("spawn_x", sc.spawn.x);
      r.take("spawn_y", sc.spawn.y);
      r.take("join_battery_frac", sc.join_battery_frac);
      r.take("initial_battery_frac", sc.initial_battery_frac);
      r.take("quit_threshold_frac", sc.quit_threshold_frac);
    } else if (name == "users") {
      r.take("total", sc.users.total_users);
      r.take("demand", sc.users.demand);
    } else if (name == "energy") {
      EnergyModel& em = sc.energy;
      r.take("b_max", em.b_max);
      r.take("hover_cost", em.hover_cost);
      r.take("serve_cost", em.serve_cost);
      r.take("move_cost", em.move_cost);
      r.take("idle_cost", em.idle_cost);
      r.take("climb_cost", em.climb_cost);
      r.take("pv_rate", em.pv_rate);
      r.take("cloud_top", em.cloud_top);
      r.take("attenuation_k", em.attenuation_k);
      r.take("reserve_frac", em.reserve_frac);
      if (r.has("intensity")) {
        std::array<double, 24> tab{};
        r.take("intensity", tab);
        em.intensity_table = tab;
      }
    } else if (name == "coverage") {
      double deg = sc.coverage.aperture_rad * 180.0 / M_PI;
      r.take("aperture_deg", deg);
      sc.coverage.aperture_rad = deg * M_PI / 180.0;
      r.take("capacity", sc.coverage.capacity);
    } else if (name == "ddpg") {
      DdpgConfig& d = cfg.ddpg;
      r.take("hidden", d.hidden);
      r.take("actor_lr", d.actor_lr);
      r.take("critic_lr", d.critic_lr);
      r.take("gamma", d.gamma);
      r.take("tau", d.tau);
      r.take("batch", d.batch);
      r.take("buffer", d.buffer_capacity);
      r.take("warmup", d.warmup);
      r.take("sigma_start", d.sigma_start);
      r.take("sigma_end", d.sigma_end);
      r.take("sigma_decay_frac", d.sigma_decay_frac);
      r.take("beta", d.beta);
      r.take("event_boost", d.event_boost);
      r.take("event_boost_factor", d.event_boost_factor);
      r.take("event_boost_window", d.event_boost_window);
    } else if (name == "dqn") {
      DqnConfig& d = cfg.dqn;
      r.take("hidden", d.hidden);
      r.take("lr", d.lr);
      r.take("gamma", d.gamma);
      r.take("tau", d.tau);
      r.take("batch", d.batch);
      r.take("buffer", d.buffer_capacity);
      r.take("warmup", d.warmup);
      r.take("eps_start", d.eps_start);
      r.take("eps_end", d.eps_end);
      r.take("eps_decay_frac", d.eps_decay_frac);
      r.take("delta", d.delta);
      r.take("lambda", d.lambda);
    } else if (name == "scheduler") {
      SchedulerConfig& s = cfg.sched;
      r.take("hours", s.hours);
      r.take("p_min", s.p_min);
      r.take("coeff", s.coeff);
      r.take("theta_charge", s.theta_charge);
      r.take("theta_serve", s.theta_serve);
      r.take("restarts", s.restarts);
      r.take("mapping_episodes", s.mapping_episodes);
      r.take("backend", s.backend);
    } else if (name == "run") {
      r.take("episodes", cfg.run.episodes);
      r.take("workers", cfg.run.workers);
      r.take("seed", cfg.run.seed);
      r.take("out", cfg.run.out_dir);
    } else {
      fail(src, table.line, "unknown section [" + name + "]");
    }
    r.finish();
  }

  for (auto& [name, tables] : doc.arrays) {
    if (name == "cluster") {
      sc.users.clusters.clear();
      for (RawTable& t : tables) {
        Reader r(t, name, src);
        Cluster c;
        c.weight = 1.0;
        r.take("x", c.center.x);
        r.take("y", c.center.y);
        r.take("vx", c.velocity.x);
        r.take("vy", c.velocity.y);
        r.take("std", c.std_dev);
        r.take("weight", c.weight);
        r.finish();
        sc.users.clusters.push_back(c);
      }
    } else if (name == "event") {
      sc.events.clear();
      for (RawTable& t : tables) {
        Reader r(t, name, src);
        CrewEvent e;
        std::string kind = "quit";
        r.take("kind", kind);
        if (kind == "quit") {
          e.kind = CrewEventKind::Quit;
        } else if (kind == "join") {
          e.kind = CrewEventKind::Join;
        } else {
          fail(src, t.line, "event kind must be \"quit\" or \"join\"");
        }
        r.take("uav", e.uav_id);
        r.take("slot", e.slot);
        r.take("battery", e.battery);
        r.take("countdown", e.countdown);
        r.finish();
        sc.events.push_back(e);
      }
    } else if (name == "uav") {
      sc.uav_starts.clear();
      for (RawTable& t : tables) {
        Reader r(t, name, src);
        UavStart u;
        r.take("x", u.x);
        r.take("y", u.y);
        r.take("away", u.away);
        r.finish();
        sc.uav_starts.push_back(u);
      }
    }
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_arr(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

std::string fmt_arr_int(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

}  // namespace

UavStart ScenarioConfig::default_start(int id) const {
  Vec2 c = region.center();
  if (n_max == 1) return {c.x, c.y, false};
  double r = std::min(region.width, region.height) / 4.0;
  double phi = 2.0 * M_PI * id / n_max;
  return {c.x + r * std::cos(phi), c.y + r * std::sin(phi), false};
}

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& msg) { throw ConfigError("invalid scenario: " + msg); };
  if (region.width <= 0 || region.height <= 0) bad("region must be positive");
  if (n_max < 1) bad("n_max must be >= 1");
  if (slots < 1) bad("slots must be >= 1");
  if (slot_duration <= 0) bad("slot_duration must be > 0");
  if (start_hour < 0 || start_hour > 23) bad("start_hour must be in [0,23]");
  if (d_max <= 0) bad("d_max must be > 0");
  if (h_serve <= 0) bad("h_serve must be > 0");
  if (join_battery_frac < 0 || join_battery_frac > 1) bad("join_battery_frac in [0,1]");
  if (initial_battery_frac < 0 || initial_battery_frac > 1) bad("initial_battery_frac in [0,1]");
  if (quit_threshold_frac < 0 || quit_threshold_frac > 1) bad("quit_threshold_frac in [0,1]");
  if (users.total_users < 0) bad("users.total must be >= 0");
  double wsum = 0.0;
  for (const Cluster& c : users.clusters) {
    if (c.std_dev <= 0) bad("cluster std must be > 0");
    if (c.weight < 0) bad("cluster weight must be >= 0");
    wsum += c.weight;
  }
  if (!users.clusters.empty() && std::abs(wsum - 1.0) > 1e-6)
    bad("cluster weights must sum to 1");
  for (double d : users.demand)
    if (d < 0 || d > 1) bad("demand values must be in [0,1]");
  for (const CrewEvent& e : events) {
    if (e.uav_id < 0 || e.uav_id >= n_max) bad("event uav id out of range");
    if (e.slot < 0 && e.battery < 0) bad("event needs a slot or battery trigger");
    if (e.kind == CrewEventKind::Join && e.slot < 0) bad("join events need a slot");
  }
  if (coverage.aperture_rad <= 0 || coverage.aperture_rad >= M_PI)
    bad("aperture must be in (0,180) degrees");
  if (coverage.capacity <= 0) bad("capacity must be > 0");
  const EnergyModel& em = energy;
  if (em.b_max <= 0) bad("b_max must be > 0");
  if (em.hover_cost < 0 || em.serve_cost < 0 || em.move_cost < 0 ||
      em.idle_cost < 0 || em.climb_cost < 0 || em.pv_rate < 0)
    bad("energy costs must be >= 0");
  if (em.attenuation_k <= 0) bad("attenuation_k must be > 0");
  if (em.cloud_top <= 0) bad("cloud_top must be > 0");
  if (em.reserve_frac < 0 || em.reserve_frac > 1) bad("reserve_frac in [0,1]");
  if (em.intensity_table)
    for (double v : *em.intensity_table)
      if (v < 0 || v > 1) bad("intensity values must be in [0,1]");
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name) {
  ExperimentConfig cfg;
  cfg.scenario.users.demand = kDefaultDemand;
  RawDoc doc = parse_raw(text, source_name);
  apply_doc(doc, cfg);
  if (cfg.scenario.users.clusters.empty()) {
    Cluster c;
    c.center = cfg.scenario.region.center();
    c.std_dev = cfg.scenario.region.width / 8.0;
    c.weight = 1.0;
    cfg.scenario.users.clusters.push_back(c);
  }
  cfg.scenario.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.filename().string());
}

void apply_overrides(ExperimentConfig& cfg,
                     const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    std::size_t eq = ov.find('=');
    std::size_t dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override must look like section.key=value: " + ov);
    std::string section = ov.substr(0, dot);
    if (is_array_section(section))
      throw ConfigError("cannot override [[" + section + "]] tables via --set");
    std::string text = "[" + section + "]\n" + ov.substr(dot + 1) + "\n";
    RawDoc doc = parse_raw(text, "--set " + ov);
    apply_doc(doc, cfg);
  }
  cfg.scenario.validate();
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  std::ostringstream o;
  o << "[region]\n"
    << "width = " << fmt(sc.region.width) << "\n"
    << "height = " << fmt(sc.region.height) << "\n\n";
  o << "[clock]\n"
    << "slots = " << sc.slots << "\n"
    << "slot_duration = " << fmt(sc.slot_duration) << "\n"
    << "start_hour = " << sc.start_hour << "\n\n";
  o << "[crew]\n"
    << "n_max = " << sc.n_max << "\n"
    << "d_max = " << fmt(sc.d_max) << "\n"
    << "h_serve = " << fmt(sc.h_serve) << "\n"
    << "spawn_x = " << fmt(sc.spawn.x) << "\n"
    << "spawn_y = " << fmt(sc.spawn.y) << "\n"
    << "join_battery_frac = " << fmt(sc.join_battery_frac) << "\n"
    << "initial_battery_frac = " << fmt(sc.initial_battery_frac) << "\n"
    << "quit_threshold_frac = " << fmt(sc.quit_threshold_frac) << "\n\n";
  for (const UavStart& u : sc.uav_starts)
    o << "[[uav]]\n"
      << "x = " << fmt(u.x) << "\n"
      << "y = " << fmt(u.y) << "\n"
      << "away = " << (u.away ? "true" : "false") << "\n\n";
  o << "[users]\n"
    << "total = " << sc.users.total_users << "\n"
    << "demand = " << fmt_arr(sc.users.demand) << "\n\n";
  for (const Cluster& c : sc.users.clusters)
    o << "[[cluster]]\n"
      << "x = " << fmt(c.center.x) << "\n"
      << "y = " << fmt(c.center.y) << "\n"
      << "vx = " << fmt(c.velocity.x) << "\n"
      << "vy = " << fmt(c.velocity.y) << "\n"
      << "std = " << fmt(c.std_dev) << "\n"
      << "weight = " << fmt(c.weight) << "\n\n";
  for (const CrewEvent& e : sc.events) {
    o << "[[event]]\n"
      << "kind = \"" << (e.kind == CrewEventKind::Quit ? "quit" : "join") << "\"\n"
      << "uav = " << e.uav_id << "\n"
      << "slot = " << e.slot << "\n";
    if (e.battery >= 0) o << "battery = " << fmt(e.battery) << "\n";
    if (e.kind == CrewEventKind::Join) o << "countdown = " << e.countdown << "\n";
    o << "\n";
  }
  const EnergyModel& em = sc.energy;
  o << "[energy]\n"
    << "b_max = " << fmt(em.b_max) << "\n"
    << "hover_cost = " << fmt(em.hover_cost) << "\n"
    << "serve_cost = " << fmt(em.serve_cost) << "\n"
    << "move_cost = " << fmt(em.move_cost) << "\n"
    << "idle_cost = " << fmt(em.idle_cost) << "\n"
    << "climb_cost = " << fmt(em.climb_cost) << "\n"
    << "pv_rate = " << fmt(em.pv_rate) << "\n"
    << "cloud_top = " << fmt(em.cloud_top) << "\n"
    << "attenuation_k = " << fmt(em.attenuation_k) << "\n"
    << "reserve_frac = " << fmt(em.reserve_frac) << "\n";
  if (em.intensity_table)
    o << "intensity = "
      << fmt_arr(std::span<const double>(em.intensity_table->data(), 24)) << "\n";
  o << "\n[coverage]\n"
    << "aperture_deg = " << fmt(sc.coverage.aperture_rad * 180.0 / M_PI) << "\n"
    << "capacity = " << sc.coverage.capacity << "\n\n";
  const DdpgConfig& d = cfg.ddpg;
  o << "[ddpg]\n"
    << "hidden = " << fmt_arr_int(d.hidden) << "\n"
    << "actor_lr = " << fmt(d.actor_lr) << "\n"
    << "critic_lr = " << fmt(d.critic_lr) << "\n"
    << "gamma = " << fmt(d.gamma) << "\n"
    << "tau = " << fmt(d.tau) << "\n"
    << "batch = " << d.batch << "\n"
    << "buffer = " << d.buffer_capacity << "\n"
    << "warmup = " << d.warmup << "\n"
    << "sigma_start = " << fmt(d.sigma_start) << "\n"
    << "sigma_end = " << fmt(d.sigma_end) << "\n"
    << "sigma_decay_frac = " << fmt(d.sigma_decay_frac) << "\n"
    << "beta = " << fmt(d.beta) << "\n"
    << "event_boost = " << (d.event_boost ? "true" : "false") << "\n"
    << "event_boost_factor = " << fmt(d.event_boost_factor) << "\n"
    << "event_boost_window = " << d.event_boost_window << "\n\n";
  const DqnConfig& q = cfg.dqn;
  o << "[dqn]\n"
    << "hidden = " << fmt_arr_int(q.hidden) << "\n"
    << "lr = " << fmt(q.lr) << "\n"
    << "gamma = " << fmt(q.gamma) << "\n"
    << "tau = " << fmt(q.tau) << "\n"
    << "batch = " << q.batch << "\n"
    << "buffer = " << q.buffer_capacity << "\n"
    << "warmup = " << q.warmup << "\n"
    << "eps_start = " << fmt(q.eps_start) << "\n"
    << "eps_end = " << fmt(q.eps_end) << "\n"
    << "eps_decay_frac = " << fmt(q.eps_decay_frac) << "\n"
    << "delta = " << fmt(q.delta) << "\n"
    << "lambda = " << fmt(q.lambda) << "\n\n";
  const SchedulerConfig& s = cfg.sched;
  o << "[scheduler]\n"
    << "hours = " << s.hours << "\n"
    << "p_min = " << fmt(s.p_min) << "\n"
    << "coeff = " << fmt(s.coeff) << "\n"
    << "theta_charge = " << fmt(s.theta_charge) << "\n"
    << "theta_serve = " << fmt(s.theta_serve) << "\n"
    << "restarts = " << s.restarts << "\n"
    << "mapping_episodes = " << s.mapping_episodes << "\n"
    << "backend = \"" << s.backend << "\"\n\n";
  o << "[run]\n"
    << "episodes = " << cfg.run.episodes << "\n"
    << "workers = " << cfg.run.workers << "\n"
    << "seed = " << cfg.run.seed << "\n"
    << "out = \"" << cfg.run.out_dir << "\"\n";
  return o.str();
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  std::string text = serialize_config(cfg);
  return fnv1a64(text.data(), text.size());
}

}  // namespace ucn
