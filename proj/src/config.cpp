#include "ceda/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>

namespace ceda {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) { return static_cast<int>(to_integer(s)); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

constexpr Cell kAuto{-1, -1};

Cell to_cell(const std::string& s) {
  if (s == "auto") return kAuto;
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("expected a cell 'x,y', got '" + s + "'");
  return {to_int(parts[0]), to_int(parts[1])};
}

std::string fmt_cell(Cell c) {
  if (c == kAuto) return "auto";
  return std::to_string(c.x) + "," + std::to_string(c.y);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

double probability(const std::string& s) {
  const double v = to_double(s);
  require(v >= 0.0 && v <= 1.0, "value must lie in [0,1], got " + s);
  return v;
}

double non_negative(const std::string& s) {
  const double v = to_double(s);
  require(v >= 0.0, "value must be >= 0, got " + s);
  return v;
}

double positive(const std::string& s) {
  const double v = to_double(s);
  require(v > 0.0, "value must be > 0, got " + s);
  return v;
}

int positive_int(const std::string& s) {
  const int v = to_int(s);
  require(v > 0, "value must be a positive integer, got " + s);
  return v;
}

int non_negative_int(const std::string& s) {
  const int v = to_int(s);
  require(v >= 0, "value must be a non-negative integer, got " + s);
  return v;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CEDA_DOUBLE(KEY, FIELD, CHECK)                                            \
  Entry{KEY, [](RunConfig& c, const std::string& v) { c.FIELD = CHECK(v); }, \
        [](const RunConfig& c) { return fmt_double(c.FIELD); }}
#define CEDA_INT(KEY, FIELD, CHECK)                                               \
  Entry{KEY, [](RunConfig& c, const std::string& v) { c.FIELD = CHECK(v); }, \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }}
#define CEDA_CELL(KEY, FIELD)                                                        \
  Entry{KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_cell(v); }, \
        [](const RunConfig& c) { return fmt_cell(c.FIELD); }}
#define CEDA_RANGE(KEY, LO, HI)                                                  \
  Entry{KEY,                                                                     \
        [](RunConfig& c, const std::string& v) {                                 \
          const auto parts = split(v, ',');                                      \
          require(parts.size() == 2, "expected a range 'lo,hi', got '" + v + "'"); \
          c.LO = non_negative(parts[0]);                                         \
          c.HI = non_negative(parts[1]);                                         \
          require(c.LO <= c.HI, "range must satisfy lo <= hi, got '" + v + "'"); \
        },                                                                       \
        [](const RunConfig& c) { return fmt_double(c.LO) + "," + fmt_double(c.HI); }}

const std::vector<Entry>& table() {
  static const std::vector<Entry> entries = {
      Entry{"world.grid",
            [](RunConfig& c, const std::string& v) {
              const auto x = v.find('x');
              require(x != std::string::npos, "expected 'WIDTHxHEIGHT', got '" + v + "'");
              c.world.width = positive_int(trim(v.substr(0, x)));
              c.world.height = positive_int(trim(v.substr(x + 1)));
            },
            [](const RunConfig& c) {
              return std::to_string(c.world.width) + "x" + std::to_string(c.world.height);
            }},
      CEDA_INT("world.obstacles", world.obstacle_count, non_negative_int),
      Entry{"world.map_seed",
            [](RunConfig& c, const std::string& v) {
              const long long s = to_integer(v);
              require(s >= 0, "map_seed must be non-negative");
              c.world.map_seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.world.map_seed); }},
      CEDA_INT("world.max_steps", world.max_steps, positive_int),
      CEDA_DOUBLE("world.battery_capacity", world.battery_capacity, positive),
      CEDA_DOUBLE("world.drain_base", world.drain_base, non_negative),
      CEDA_DOUBLE("world.drain_wind", world.drain_wind, non_negative),
      CEDA_DOUBLE("world.battery_low", world.battery_low, non_negative),
      CEDA_CELL("world.start0", world.start0),
      CEDA_CELL("world.start1", world.start1),
      CEDA_CELL("world.landing0", world.landing0),
      CEDA_CELL("world.landing1", world.landing1),

      CEDA_INT("triage.n_init", triage.n_init, non_negative_int),
      CEDA_INT("triage.spawn_interval", triage.spawn_interval, positive_int),
      CEDA_INT("triage.max_patients", triage.max_patients, positive_int),
      CEDA_INT("triage.timer_max", triage.timer_max, positive_int),
      CEDA_RANGE("triage.stable_a", triage.stable.a_min, triage.stable.a_max),
      CEDA_RANGE("triage.stable_b", triage.stable.b_min, triage.stable.b_max),
      CEDA_RANGE("triage.urgent_a", triage.urgent.a_min, triage.urgent.a_max),
      CEDA_RANGE("triage.urgent_b", triage.urgent.b_min, triage.urgent.b_max),
      CEDA_RANGE("triage.critical_a", triage.critical.a_min, triage.critical.a_max),
      CEDA_RANGE("triage.critical_b", triage.critical.b_min, triage.critical.b_max),
      CEDA_RANGE("triage.theta_serious", triage.theta_serious_min, triage.theta_serious_max),
      CEDA_RANGE("triage.theta_critical", triage.theta_critical_min, triage.theta_critical_max),
      CEDA_DOUBLE("triage.theta_margin", triage.theta_margin, non_negative),
      CEDA_INT("triage.w_max", triage.w_max, positive_int),

      CEDA_INT("hazards.wind_zones", hazards.wind_zone_count, non_negative_int),
      CEDA_INT("hazards.lowsig_zones", hazards.lowsig_zone_count, non_negative_int),
      CEDA_INT("hazards.zone_length", hazards.zone_length, non_negative_int),
      CEDA_INT("hazards.refresh_interval", hazards.refresh_interval, positive_int),
      CEDA_DOUBLE("hazards.wind_fail_prob", hazards.wind_fail_prob, probability),
      CEDA_DOUBLE("hazards.lowsig_fail_prob", hazards.lowsig_fail_prob, probability),

      CEDA_DOUBLE("reward.delta", reward.delta, non_negative),
      CEDA_DOUBLE("reward.beta", reward.beta, non_negative),
      CEDA_DOUBLE("reward.lambda", reward.lambda, non_negative),
      CEDA_DOUBLE("reward.gamma_w", reward.gamma_w, non_negative),
      CEDA_DOUBLE("reward.gamma_s", reward.gamma_s, non_negative),
      CEDA_DOUBLE("reward.gamma_b", reward.gamma_b, non_negative),
      CEDA_DOUBLE("reward.closeness", reward.closeness, non_negative),
      CEDA_INT("reward.r_close", reward.r_close, non_negative_int),
      CEDA_DOUBLE("reward.delta_max", reward.delta_max, positive),
      CEDA_DOUBLE("reward.r_goal", reward.r_goal, non_negative),
      CEDA_DOUBLE("reward.r_crash", reward.r_crash, non_negative),
      CEDA_DOUBLE("reward.r_bat", reward.r_bat, non_negative),
      CEDA_DOUBLE("reward.r_land", reward.r_land, non_negative),
      CEDA_DOUBLE("reward.p_death", reward.p_death, non_negative),
      CEDA_DOUBLE("reward.invalid_land_penalty", reward.invalid_land_penalty, non_negative),

      CEDA_INT("learner.episodes", learner.episodes, positive_int),
      Entry{"learner.hidden",
            [](RunConfig& c, const std::string& v) {
              c.learner.hidden.clear();
              for (const auto& p : split(v, ',')) c.learner.hidden.push_back(positive_int(p));
            },
            [](const RunConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.learner.hidden.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(c.learner.hidden[i]);
              }
              return s;
            }},
      CEDA_INT("learner.buffer_capacity", learner.buffer_capacity, positive_int),
      CEDA_INT("learner.batch_size", learner.batch_size, positive_int),
      CEDA_DOUBLE("learner.gamma", learner.gamma, probability),
      CEDA_DOUBLE("learner.learning_rate", learner.learning_rate, positive),
      CEDA_INT("learner.target_sync", learner.target_sync, positive_int),
      CEDA_DOUBLE("learner.epsilon_start", learner.epsilon_start, probability),
      CEDA_DOUBLE("learner.epsilon_min", learner.epsilon_min, probability),
      CEDA_DOUBLE("learner.epsilon_decay_fraction", learner.epsilon_decay_fraction, probability),
      CEDA_DOUBLE("learner.grad_clip", learner.grad_clip, positive),
      CEDA_INT("learner.checkpoint_interval", learner.checkpoint_interval, positive_int),

      CEDA_INT("eval.episodes", eval.episodes, positive_int),
      CEDA_INT("eval.workers", eval.workers, positive_int),
      CEDA_DOUBLE("eval.reserve_factor", eval.reserve_factor, to_double),
      CEDA_DOUBLE("eval.safety_margin_steps", eval.safety_margin_steps, non_negative),
  };
  return entries;
}

#undef CEDA_DOUBLE
#undef CEDA_INT
#undef CEDA_CELL
#undef CEDA_RANGE

}  // namespace

Cell WorldConfig::start(int agent) const {
  const Cell c = agent == 0 ? start0 : start1;
  if (c != kAuto) return c;
  return agent == 0 ? Cell{1, 1} : Cell{width - 2, height - 2};
}

Cell WorldConfig::landing(int agent) const {
  const Cell c = agent == 0 ? landing0 : landing1;
  if (c != kAuto) return c;
  return agent == 0 ? Cell{0, 0} : Cell{width - 1, height - 1};
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : table()) {
    if (e.key == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  for (const auto& e : table()) {
    if (e.key == key) return e.get(cfg);
  }
  throw ConfigError("unknown key '" + key + "'");
}

void validate(const RunConfig& cfg) {
  const auto& w = cfg.world;
  GridMap bounds(w.width, w.height);
  for (const Cell c : {w.start(0), w.start(1), w.landing(0), w.landing(1)}) {
    require(bounds.in_bounds(c), "start and landing cells must lie inside the grid");
  }
  require(w.start(0) != w.start(1), "drone start cells must differ");
  require(w.landing(0) != w.landing(1), "landing zones must differ");
  require(w.drain_wind >= w.drain_base, "world.drain_wind must be >= world.drain_base");
  const auto& t = cfg.triage;
  require(t.n_init <= t.max_patients, "triage.n_init must be <= triage.max_patients");
  require(t.theta_critical_min + t.theta_margin < t.theta_serious_max,
          "theta ranges admit no pair with theta_critical < theta_serious - margin");
  for (const LevelDecay* d : {&t.stable, &t.urgent, &t.critical}) {
    require(d->a_min > 0.0 && d->b_min > 0.0, "decay parameters a and b must be > 0");
  }
  require(cfg.eval.reserve_factor >= 1.0, "eval.reserve_factor must be >= 1");
  require(!cfg.learner.hidden.empty(), "learner.hidden needs at least one layer");
  require(cfg.learner.epsilon_min <= cfg.learner.epsilon_start,
          "learner.epsilon_min must be <= learner.epsilon_start");
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    try {
      if (eq == std::string::npos) throw ConfigError("expected 'section.key = value'");
      set_config_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string echo_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : table()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : table()) keys.push_back(e.key);
  return keys;
}

}  // namespace ceda
