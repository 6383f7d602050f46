#include "ceda/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ceda/incentives.hpp"
#include "ceda/trainer.hpp"

namespace ceda {
namespace {

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_field(const std::string& s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("malformed CSV field '" + s + "'");
  }
  return v;
}

std::string scaled_value(const std::string& current, double factor) {
  std::string out;
  std::string part;
  std::istringstream in(current);
  bool first = true;
  while (std::getline(in, part, ',')) {
    const bool integral = part.find_first_of(".eE") == std::string::npos;
    const double v = parse_field<double>(part) * factor;
    if (!first) out += ",";
    out += integral ? std::to_string(std::llround(v)) : num(v);
    first = false;
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

Policy Policy::from_network(std::shared_ptr<const QNetwork> net, AblationMask mask) {
  Policy p;
  p.network = std::move(net);
  p.mask = mask;
  return p;
}

Policy Policy::from_baseline(Baseline b, LandingRule rule) {
  Policy p;
  p.baseline = b;
  p.landing_rule = rule;
  return p;
}

std::string Policy::name() const {
  if (baseline) return std::string(baseline_name(*baseline));
  return "ceda";
}

RunConfig Scenario::apply(const RunConfig& base) const {
  RunConfig cfg = base;
  for (const auto& o : overrides) {
    if (o.op == ScenarioOverride::Op::Set) {
      set_config_value(cfg, o.key, o.value);
    } else {
      set_config_value(cfg, o.key, scaled_value(get_config_value(cfg, o.key), o.factor));
    }
  }
  cfg.triage.n_init = std::clamp(cfg.triage.n_init, 1, cfg.triage.max_patients);
  validate(cfg);
  return cfg;
}

const std::vector<Scenario>& standard_scenarios() {
  using Op = ScenarioOverride::Op;
  static const std::vector<Scenario> scenarios = {
      {"baseline", {}},
      {"high-network-stress", {{"hazards.lowsig_fail_prob", Op::Set, "0.6"}}},
      {"fast-decay",
       {{"triage.stable_a", Op::Scale, "", 2.0},
        {"triage.urgent_a", Op::Scale, "", 2.0},
        {"triage.critical_a", Op::Scale, "", 2.0}}},
      {"sparse-patients",
       {{"triage.n_init", Op::Scale, "", 0.5}, {"triage.spawn_interval", Op::Scale, "", 2.0}}},
      {"dense-patients",
       {{"triage.n_init", Op::Scale, "", 1.5}, {"triage.spawn_interval", Op::Scale, "", 0.5}}},
      {"low-disruption",
       {{"hazards.wind_fail_prob", Op::Set, "0"}, {"hazards.lowsig_fail_prob", Op::Set, "0"}}},
  };
  return scenarios;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : standard_scenarios()) {
    if (s.name == name) return s;
  }
  std::string known;
  for (const auto& s : standard_scenarios()) known += (known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  return derive_seed(seed, 0x5EED0000ULL + static_cast<std::uint64_t>(episode));
}

void check_compatible(const Policy& policy, const RunConfig& cfg) {
  if (!policy.network) return;
  const int expected = 2 * static_cast<int>(features::observation_size(cfg.triage.max_patients));
  if (policy.network->input_size() != expected) {
    throw ConfigError("checkpoint expects joint state of length " +
                      std::to_string(policy.network->input_size()) + " but the scenario with M=" +
                      std::to_string(cfg.triage.max_patients) + " produces " +
                      std::to_string(expected));
  }
  if (policy.network->output_size() != kActionCount) {
    throw ConfigError("checkpoint output size must be " + std::to_string(kActionCount));
  }
}

EpisodeRecord run_episode(const Policy& policy, const RunConfig& cfg, std::uint64_t seed,
                          RecorderOptions opts) {
  check_compatible(policy, cfg);
  World world(cfg, cfg.world.map_seed);
  world.reset(seed);
  EpisodeRecorder recorder(opts);
  recorder.begin(world, seed);
  CoordinationState coord;
  const auto m = static_cast<std::size_t>(cfg.triage.max_patients);
  while (!world.terminal()) {
    std::array<Action, kAgents> acts{Action::Land, Action::Land};
    for (int k = 0; k < kAgents; ++k) {
      if (world.drone(k).landed) continue;
      if (policy.network) {
        JointState js = joint_state(world, k);
        if (!policy.mask.empty()) apply_mask(js, policy.mask, m);
        acts[k] = static_cast<Action>(greedy_action(policy.network->forward(js)));
      } else {
        acts[k] = baseline_action(*policy.baseline, world, k, coord, policy.landing_rule);
      }
    }
    const PreStep pre = capture_pre_step(world);
    StepOutcome out = world.step(acts);
    const auto rewards = assign_rewards(world, out, pre, cfg.reward);
    recorder.observe(world, out, rewards);
  }
  return recorder.finish(world);
}

std::vector<EpisodeRecord> evaluate(const Policy& policy, const RunConfig& cfg,
                                    std::uint64_t seed, int n_episodes, int workers,
                                    RecorderOptions opts) {
  if (n_episodes <= 0) throw std::invalid_argument("evaluation needs at least one episode");
  check_compatible(policy, cfg);
  std::vector<EpisodeRecord> out(static_cast<std::size_t>(n_episodes));
  const int threads = std::clamp(workers, 1, n_episodes);
  if (threads == 1) {
    for (int i = 0; i < n_episodes; ++i) out[i] = run_episode(policy, cfg, episode_seed(seed, i), opts);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n_episodes; i = next++) {
          try {
            out[i] = run_episode(policy, cfg, episode_seed(seed, i), opts);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

MetricSummary summarize(const std::vector<EpisodeRecord>& records) {
  MetricSummary s;
  s.episodes = static_cast<int>(records.size());
  if (records.empty()) return s;
  for (const auto& r : records) {
    s.eta += triage_efficiency(r).value_or(0.0);
    s.utilization += utilization(r).value_or(0.0);
    s.both_landed_rate += r.both_landed() ? 1.0 : 0.0;
    s.delivered += r.delivered();
    s.battery += 0.5 * (r.end_battery[0] + r.end_battery[1]);
    s.w3_expired += r.expired_by_class()[2];
    s.collisions += r.collisions();
    s.reward += r.reward[0] + r.reward[1];
  }
  const double n = static_cast<double>(records.size());
  for (double* v : {&s.eta, &s.utilization, &s.both_landed_rate, &s.delivered, &s.battery,
                    &s.w3_expired, &s.collisions, &s.reward}) {
    *v /= n;
  }
  return s;
}

PerClassStats per_class_stats(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("per_class_stats needs at least one record");
  PerClassStats s;
  std::array<double, 3> del{}, exp{}, spawn{};
  for (const auto& r : records) {
    const auto d = r.delivered_by_class();
    const auto e = r.expired_by_class();
    const auto sp = r.spawned_by_class();
    for (int c = 0; c < 3; ++c) {
      del[c] += d[c];
      exp[c] += e[c];
      spawn[c] += sp[c];
    }
  }
  const double n = static_cast<double>(records.size());
  for (int c = 0; c < 3; ++c) {
    s.mean_delivered[c] = del[c] / n;
    s.mean_expired[c] = exp[c] / n;
    s.mean_spawned[c] = spawn[c] / n;
    s.delivery_rate[c] = spawn[c] > 0 ? del[c] / spawn[c] : 0.0;
    s.unserved_rate[c] = spawn[c] > 0 ? exp[c] / spawn[c] : 0.0;
  }
  s.delivery_rate_jain = jain_index(s.delivery_rate);
  return s;
}

RunConfig stress_config(const RunConfig& base, int load_row, double lowsig_fail_prob) {
  using Op = ScenarioOverride::Op;
  Scenario s{"stress", {}};
  if (load_row != 1) {
    const double decay = load_row == 0 ? 0.5 : 2.0;
    const double spawn = load_row == 0 ? 2.0 : 0.5;
    for (const char* key : {"triage.stable_a", "triage.urgent_a", "triage.critical_a"}) {
      s.overrides.push_back({key, Op::Scale, "", decay});
    }
    s.overrides.push_back({"triage.spawn_interval", Op::Scale, "", spawn});
  }
  s.overrides.push_back({"hazards.lowsig_fail_prob", Op::Set, num(lowsig_fail_prob)});
  return s.apply(base);
}

std::vector<StressCell> stress_grid(const Policy& policy, const RunConfig& base, int n_episodes,
                                    std::uint64_t seed, int workers) {
  if (n_episodes <= 0) throw std::invalid_argument("stress grid cells need at least one episode");
  std::vector<StressCell> cells;
  for (int row = 0; row < 3; ++row) {
    for (double p : kStressFailProbs) {
      const auto records = evaluate(policy, stress_config(base, row, p), seed, n_episodes, workers);
      const MetricSummary m = summarize(records);
      cells.push_back({kStressLoads[row], p, m.eta, m.both_landed_rate, m.w3_expired});
    }
  }
  return cells;
}

std::vector<std::pair<std::string, AblationMask>> ablation_conditions() {
  AblationMask net, wind, battery, weights, timers;
  net.zero_lowsig_view = true;
  wind.zero_wind_view = true;
  battery.zero_battery = true;
  weights.zero_weights = true;
  timers.zero_timers = true;
  return {{"full", {}},
          {"no-network", net},
          {"no-wind-physical", wind},
          {"no-battery", battery},
          {"no-triage-weights", weights},
          {"no-patient-timers", timers}};
}

std::vector<AblationRow> ablation_suite(std::shared_ptr<const QNetwork> net, const RunConfig& base,
                                        int n_episodes, std::uint64_t seed, int workers) {
  std::vector<AblationRow> rows;
  for (const auto& [name, mask] : ablation_conditions()) {
    const auto records = evaluate(Policy::from_network(net, mask), base, seed, n_episodes, workers);
    const MetricSummary m = summarize(records);
    rows.push_back({name, mask, m.eta, m.both_landed_rate, m.delivered, m.battery, m.w3_expired});
  }
  return rows;
}

EpisodeRow EpisodeRow::from_record(const EpisodeRecord& rec) {
  EpisodeRow r;
  r.seed = rec.seed;
  r.steps = rec.steps;
  r.reward0 = rec.reward[0];
  r.reward1 = rec.reward[1];
  r.delivered = rec.delivered();
  r.expired = rec.expired();
  r.landed0 = rec.landed[0];
  r.landed1 = rec.landed[1];
  r.both_landed = rec.both_landed();
  r.battery0 = rec.end_battery[0];
  r.battery1 = rec.end_battery[1];
  r.collisions = rec.collisions();
  r.utilization = ceda::utilization(rec);
  r.eta = triage_efficiency(rec);
  r.delivered_by_class = rec.delivered_by_class();
  r.expired_by_class = rec.expired_by_class();
  return r;
}

std::string episodes_csv_header() {
  return "seed,steps,reward0,reward1,delivered,expired,landed0,landed1,bothLanded,battery0,"
         "battery1,collisions,U,eta,d_w1,d_w2,d_w3,u_w1,u_w2,u_w3";
}

void write_episodes_csv(const std::vector<EpisodeRow>& rows, std::ostream& out) {
  out << episodes_csv_header() << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.seed << ',' << r.steps << ',' << num(r.reward0) << ',' << num(r.reward1) << ','
        << r.delivered << ',' << r.expired << ',' << r.landed0 << ',' << r.landed1 << ','
        << r.both_landed << ',' << num(r.battery0) << ',' << num(r.battery1) << ','
        << r.collisions << ',' << opt(r.utilization) << ',' << opt(r.eta);
    for (int v : r.delivered_by_class) out << ',' << v;
    for (int v : r.expired_by_class) out << ',' << v;
    out << '\n';
  }
}

std::vector<EpisodeRow> read_episodes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("episodes CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != episodes_csv_header()) throw std::runtime_error("unexpected episodes CSV header");
  std::vector<EpisodeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 20) {
      throw std::runtime_error("episodes CSV row has " + std::to_string(f.size()) + " fields");
    }
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_field<double>(s);
    };
    EpisodeRow r;
    r.seed = parse_field<std::uint64_t>(f[0]);
    r.steps = parse_field<int>(f[1]);
    r.reward0 = parse_field<double>(f[2]);
    r.reward1 = parse_field<double>(f[3]);
    r.delivered = parse_field<int>(f[4]);
    r.expired = parse_field<int>(f[5]);
    r.landed0 = parse_field<int>(f[6]) != 0;
    r.landed1 = parse_field<int>(f[7]) != 0;
    r.both_landed = parse_field<int>(f[8]) != 0;
    r.battery0 = parse_field<double>(f[9]);
    r.battery1 = parse_field<double>(f[10]);
    r.collisions = parse_field<int>(f[11]);
    r.utilization = opt(f[12]);
    r.eta = opt(f[13]);
    for (int c = 0; c < 3; ++c) {
      r.delivered_by_class[c] = parse_field<int>(f[14 + c]);
      r.expired_by_class[c] = parse_field<int>(f[17 + c]);
    }
    rows.push_back(r);
  }
  return rows;
}

void export_csv(const std::vector<EpisodeRecord>& records, const std::filesystem::path& path) {
  std::vector<EpisodeRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(EpisodeRow::from_record(r));
  auto out = open_out(path);
  write_episodes_csv(rows, out);
}

void write_stress_csv(const std::vector<StressCell>& grid, std::ostream& out) {
  out << "load,p_fail,eta,both_landed_rate,w3_unserved\n";
  for (const auto& c : grid) {
    out << c.load << ',' << num(c.lowsig_fail_prob) << ',' << num(c.eta) << ','
        << num(c.both_landed_rate) << ',' << num(c.w3_expired) << '\n';
  }
}

void write_ablation_csv(const std::vector<AblationRow>& table, std::ostream& out) {
  out << "condition,eta,both_landed_rate,delivered,battery,w3_unserved\n";
  for (const auto& r : table) {
    out << r.condition << ',' << num(r.eta) << ',' << num(r.both_landed_rate) << ','
        << num(r.delivered) << ',' << num(r.battery) << ',' << num(r.w3_expired) << '\n';
  }
}

void export_csv(const std::vector<StressCell>& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_stress_csv(grid, out);
}

void export_csv(const std::vector<AblationRow>& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_ablation_csv(table, out);
}

std::string trajectory_svg(const EpisodeRecord& rec) {
  if (rec.positions.empty() || rec.grid_width <= 0) {
    throw std::invalid_argument("trajectory export needs a record captured with per-step positions");
  }
  constexpr int kCell = 12;
  const int w = rec.grid_width * kCell;
  const int h = rec.grid_height * kCell;
  auto centre = [&](Cell c) {
    return std::pair<double, double>{(c.x + 0.5) * kCell, (c.y + 0.5) * kCell};
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  s << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";

  const int max_exposure = std::max(
      {1, *std::max_element(rec.wind_exposure.begin(), rec.wind_exposure.end()),
       *std::max_element(rec.lowsig_exposure.begin(), rec.lowsig_exposure.end())});
  for (std::size_t i = 0; i < rec.wind_exposure.size(); ++i) {
    const int x = static_cast<int>(i % rec.grid_width) * kCell;
    const int y = static_cast<int>(i / rec.grid_width) * kCell;
    if (rec.wind_exposure[i] > 0) {
      s << "<rect class=\"wind\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
        << "\" height=\"" << kCell << "\" fill=\"#ff8c00\" fill-opacity=\""
        << num(0.6 * rec.wind_exposure[i] / max_exposure) << "\"/>\n";
    }
    if (rec.lowsig_exposure[i] > 0) {
      s << "<rect class=\"lowsig\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
        << "\" height=\"" << kCell << "\" fill=\"#8a2be2\" fill-opacity=\""
        << num(0.6 * rec.lowsig_exposure[i] / max_exposure) << "\"/>\n";
    }
  }
  for (const Cell c : rec.obstacles) {
    s << "<rect class=\"obstacle\" x=\"" << c.x * kCell << "\" y=\"" << c.y * kCell
      << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"#404040\"/>\n";
  }
  const char* zone_colour[kAgents] = {"#2e8b57", "#1e90ff"};
  for (int k = 0; k < kAgents; ++k) {
    const Cell z = rec.landing_zones[k];
    s << "<rect class=\"landing\" x=\"" << z.x * kCell << "\" y=\"" << z.y * kCell
      << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"none\" stroke=\""
      << zone_colour[k] << "\" stroke-width=\"2\"/>\n";
  }

  const char* class_colour[3] = {"#1f77b4", "#ff7f0e", "#d62728"};
  for (const auto& p : rec.patients) {
    if (p.id >= static_cast<int>(rec.patient_cells.size())) continue;
    const auto [cx, cy] = centre(rec.patient_cells[p.id]);
    const int cls = std::clamp(p.spawn_weight, 1, 3) - 1;
    s << "<circle class=\"patient\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
      << kCell * 0.4 << "\" fill=\"" << class_colour[cls] << "\"/>\n";
    if (p.fate == Fate::Delivered) {
      std::ostringstream pts;
      for (int i = 0; i < 10; ++i) {
        const double r = (i % 2 == 0 ? 0.6 : 0.25) * kCell;
        const double a = -M_PI / 2 + i * M_PI / 5;
        pts << (i ? " " : "") << num(cx + r * std::cos(a)) << ',' << num(cy + r * std::sin(a));
      }
      s << "<polygon class=\"delivery\" points=\"" << pts.str()
        << "\" fill=\"#ffd700\" stroke=\"#8b7500\" stroke-width=\"0.5\"/>\n";
    }
  }

  const char* path_colour[kAgents] = {"#d62728", "#1f3cff"};
  const std::size_t n = rec.positions.size();
  for (int k = 0; k < kAgents; ++k) {
    std::ostringstream pts;
    for (std::size_t t = 0; t < n; ++t) {
      const auto [x, y] = centre(rec.positions[t][k]);
      pts << (t ? " " : "") << num(x) << ',' << num(y);
    }
    s << "<polyline class=\"agent" << k << "\" points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
      << path_colour[k] << "\" stroke-width=\"2\" stroke-opacity=\"0.5\"/>\n";
    // Time-graded dots: opacity grows along the trajectory.
    for (std::size_t t = 0; t < n; t += std::max<std::size_t>(1, n / 100)) {
      const auto [x, y] = centre(rec.positions[t][k]);
      s << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"1.5\" fill=\""
        << path_colour[k] << "\" fill-opacity=\"" << num(0.15 + 0.85 * t / std::max<std::size_t>(1, n - 1))
        << "\"/>\n";
    }
    const auto [sx, sy] = centre(rec.positions.front()[k]);
    s << "<rect class=\"start\" x=\"" << num(sx - 4) << "\" y=\"" << num(sy - 4)
      << "\" width=\"8\" height=\"8\" fill=\"" << path_colour[k] << "\"/>\n";
    const auto [ex, ey] = centre(rec.positions.back()[k]);
    s << "<polygon class=\"end\" points=\"" << num(ex) << ',' << num(ey - 5) << ' ' << num(ex + 5)
      << ',' << num(ey) << ' ' << num(ex) << ',' << num(ey + 5) << ' ' << num(ex - 5) << ','
      << num(ey) << "\" fill=\"" << path_colour[k] << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void export_trajectory_svg(const EpisodeRecord& rec, const std::filesystem::path& path) {
  const std::string svg = trajectory_svg(rec);
  auto out = open_out(path);
  out << svg;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace ceda
