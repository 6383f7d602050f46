#include "ceda/world.hpp"

#include <algorithm>
#include <string>

namespace ceda {
namespace {

enum Stream : std::uint64_t { kMap = 1, kPatients = 2, kHazards = 3, kFailures = 4 };

}  // namespace

Cell apply_move(Cell c, Action a) {
  switch (a) {
    case Action::Up: return {c.x, c.y - 1};
    case Action::Down: return {c.x, c.y + 1};
    case Action::Left: return {c.x - 1, c.y};
    case Action::Right: return {c.x + 1, c.y};
    case Action::Land: return c;
  }
  return c;
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Land: return "land";
  }
  return "?";
}

std::string_view event_name(EventKind k) {
  switch (k) {
    case EventKind::Spawned: return "spawned";
    case EventKind::Delivered: return "delivered";
    case EventKind::ObstacleCollision: return "obstacle_collision";
    case EventKind::AgentCollision: return "agent_collision";
    case EventKind::BatteryDepleted: return "battery_depleted";
    case EventKind::Landed: return "landed";
    case EventKind::PatientExpired: return "patient_expired";
    case EventKind::InvalidLand: return "invalid_land";
    case EventKind::ActionFailed: return "action_failed";
  }
  return "?";
}

int StepOutcome::count(EventKind k) const {
  return static_cast<int>(
      std::count_if(events.begin(), events.end(), [k](const Event& e) { return e.kind == k; }));
}

int StepOutcome::count(EventKind k, int agent) const {
  return static_cast<int>(std::count_if(events.begin(), events.end(), [&](const Event& e) {
    return e.kind == k && e.agent == agent;
  }));
}

World::World(const RunConfig& cfg, std::uint64_t map_seed)
    : cfg_(cfg), grid_(cfg.world.width, cfg.world.height) {
  validate(cfg_);
  const auto& w = cfg_.world;
  std::vector<Cell> reserved = {w.start(0), w.start(1), w.landing(0), w.landing(1)};
  std::vector<Cell> candidates;
  candidates.reserve(grid_.cell_count());
  for (std::size_t i = 0; i < grid_.cell_count(); ++i) {
    const Cell c = grid_.cell_at(i);
    if (std::find(reserved.begin(), reserved.end(), c) == reserved.end()) candidates.push_back(c);
  }
  if (w.obstacle_count < 0 || static_cast<std::size_t>(w.obstacle_count) >= candidates.size()) {
    throw ConfigError("obstacle count " + std::to_string(w.obstacle_count) +
                      " does not fit the " + std::to_string(candidates.size()) +
                      " free cells of the grid");
  }
  // Partial Fisher-Yates: the first obstacle_count entries are a uniform sample.
  Rng rng(derive_seed(map_seed, kMap));
  for (int i = 0; i < w.obstacle_count; ++i) {
    const auto j = i + rng.below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    grid_.set_obstacle(candidates[i]);
  }
  for (int k = 0; k < kAgents; ++k) {
    drones_[k].id = k;
    drones_[k].landing_zone = w.landing(k);
    drones_[k].pos = w.start(k);
    drones_[k].battery = w.battery_capacity;
  }
}

void World::reset(std::uint64_t episode_seed) {
  patient_rng_ = Rng(derive_seed(episode_seed, kPatients));
  hazard_rng_ = Rng(derive_seed(episode_seed, kHazards));
  failure_rng_ = Rng(derive_seed(episode_seed, kFailures));
  clock_ = 0;
  terminal_ = false;
  cause_ = TerminalCause::None;
  for (int k = 0; k < kAgents; ++k) {
    Drone& d = drones_[k];
    d.pos = cfg_.world.start(k);
    d.landed = false;
    d.base_steps = 0;
    d.wind_steps = 0;
    d.battery = cfg_.world.battery_capacity;
  }
  patients_.clear();
  reset_events_.clear();
  for (int i = 0; i < cfg_.triage.n_init; ++i) spawn_one(&reset_events_);
  refresh_hazards();
}

std::vector<Cell> World::free_spawn_cells() const {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < grid_.cell_count(); ++i) {
    const Cell c = grid_.cell_at(i);
    if (grid_.obstacle(c)) continue;
    bool taken = false;
    for (const Drone& d : drones_) taken = taken || d.pos == c || d.landing_zone == c;
    if (taken || active_patient_at(c) >= 0) continue;
    out.push_back(c);
  }
  return out;
}

bool World::spawn_one(std::vector<Event>* events) {
  const auto cells = free_spawn_cells();
  auto p = spawn_patient(patient_rng_, cells, clock_, spawned(), cfg_.triage);
  if (!p) return false;
  patients_.push_back(*p);
  if (events) {
    events->push_back({EventKind::Spawned, -1, p->id, static_cast<int>(p->spawn_level), 0, clock_});
  }
  return true;
}

int World::active_patient_at(Cell c) const {
  for (const Patient& p : patients_) {
    if (p.active() && p.loc == c) return p.id;
  }
  return -1;
}

int World::active_patient_count() const {
  return static_cast<int>(
      std::count_if(patients_.begin(), patients_.end(), [](const Patient& p) { return p.active(); }));
}

bool World::mission_complete() const {
  return spawned() >= cfg_.triage.max_patients && active_patient_count() == 0;
}

void World::mark_zone(const std::vector<Cell>& path, bool wind) {
  const int len = cfg_.hazards.zone_length;
  if (len <= 0 || path.empty()) return;
  std::size_t begin = 0;
  if (path.size() > static_cast<std::size_t>(len)) {
    begin = hazard_rng_.below(path.size() - len + 1);
  }
  const std::size_t end = std::min(path.size(), begin + static_cast<std::size_t>(len));
  for (std::size_t i = begin; i < end; ++i) {
    const Cell c = path[i];
    bool skip = active_patient_at(c) >= 0;
    for (const Drone& d : drones_) skip = skip || d.pos == c || d.landing_zone == c;
    if (skip) continue;
    if (wind) {
      grid_.set_wind(c);
    } else {
      grid_.set_lowsig(c);
    }
  }
}

void World::refresh_hazards() {
  grid_.clear_hazards();
  std::vector<const Patient*> active;
  for (const Patient& p : patients_) {
    if (p.active()) active.push_back(&p);
  }
  const int total = cfg_.hazards.wind_zone_count + cfg_.hazards.lowsig_zone_count;
  for (int z = 0; z < total; ++z) {
    const bool wind = z < cfg_.hazards.wind_zone_count;
    std::optional<std::vector<Cell>> path;
    if (active.size() >= 2) {
      const auto i = hazard_rng_.below(active.size());
      auto j = hazard_rng_.below(active.size() - 1);
      if (j >= i) ++j;
      path = astar_path(grid_, active[i]->loc, active[j]->loc);
    } else {
      // Too few patients for an inter-patient route: run from a drone to
      // a random free cell instead.
      const Drone& d = drones_[hazard_rng_.below(kAgents)];
      Cell target = grid_.cell_at(hazard_rng_.below(grid_.cell_count()));
      for (int tries = 0; grid_.obstacle(target) && tries < 64; ++tries) {
        target = grid_.cell_at(hazard_rng_.below(grid_.cell_count()));
      }
      if (!grid_.obstacle(target) && !grid_.obstacle(d.pos)) {
        path = astar_path(grid_, d.pos, target);
      }
    }
    if (path) mark_zone(*path, wind);
  }
}

void World::drain(Drone& d, bool in_wind) {
  if (in_wind) {
    ++d.wind_steps;
  } else {
    ++d.base_steps;
  }
  d.battery = cfg_.world.battery_capacity - d.base_steps * cfg_.world.drain_base -
              d.wind_steps * cfg_.world.drain_wind;
}

StepOutcome World::step(std::array<Action, kAgents> joint_action) {
  if (terminal_) throw WorldStateError("step() called on a terminal world");
  StepOutcome out;
  const int next_clock = clock_ + 1;
  auto emit = [&](EventKind k, int agent, int patient = -1, int weight = 0, int timer = 0) {
    out.events.push_back({k, agent, patient, weight, timer, next_clock});
  };

  std::array<Cell, kAgents> old_pos{drones_[0].pos, drones_[1].pos};
  std::array<Cell, kAgents> proposed = old_pos;
  std::array<bool, kAgents> was_active{!drones_[0].landed, !drones_[1].landed};

  for (int k = 0; k < kAgents; ++k) {
    Drone& d = drones_[k];
    if (d.landed) continue;
    const Drone& other = drones_[1 - k];
    const bool in_wind = grid_.wind(d.pos);
    const bool in_lowsig = grid_.lowsig(d.pos);
    const Action a = joint_action[k];
    if (a == Action::Land) {
      if (d.pos == d.landing_zone) {
        d.landed = true;
        emit(EventKind::Landed, k);
      } else {
        emit(EventKind::InvalidLand, k);
      }
    } else {
      const Cell target = apply_move(d.pos, a);
      if (!grid_.passable(target) || (other.landed && other.pos == target)) {
        emit(EventKind::ObstacleCollision, k);
      } else {
        bool failed = in_wind && failure_rng_.bernoulli(cfg_.hazards.wind_fail_prob);
        if (!failed && in_lowsig) failed = failure_rng_.bernoulli(cfg_.hazards.lowsig_fail_prob);
        if (failed) {
          emit(EventKind::ActionFailed, k);
        } else {
          proposed[k] = target;
        }
      }
    }
    drain(d, in_wind);
  }

  if (was_active[0] && was_active[1]) {
    bool collided = false;
    if (proposed[0] == proposed[1]) {
      proposed[1] = old_pos[1];
      collided = true;
    }
    if (proposed[0] == proposed[1]) {
      proposed[0] = old_pos[0];
      collided = true;
    }
    if (proposed[0] == old_pos[1] && proposed[1] == old_pos[0] && old_pos[0] != old_pos[1]) {
      proposed = old_pos;
      collided = true;
    }
    if (collided) emit(EventKind::AgentCollision, -1);
  }
  for (int k = 0; k < kAgents; ++k) drones_[k].pos = proposed[k];

  for (int k = 0; k < kAgents; ++k) {
    if (!was_active[k] || drones_[k].landed) continue;
    const int pid = active_patient_at(drones_[k].pos);
    if (pid < 0) continue;
    Patient& p = patients_[pid];
    p.delivered = true;
    p.final_weight = current_weight(p, p.elapsed(clock_));
    emit(EventKind::Delivered, k, pid, p.final_weight, p.timer_remaining);
  }

  clock_ = next_clock;
  for (const ExpiryEvent& e : tick_all(patients_, clock_)) {
    emit(EventKind::PatientExpired, -1, e.patient, e.weight);
  }
  if (spawn_due(cfg_.triage, clock_, spawned())) spawn_one(&out.events);
  if (clock_ % cfg_.hazards.refresh_interval == 0) refresh_hazards();

  bool depleted = false;
  for (int k = 0; k < kAgents; ++k) {
    if (drones_[k].battery <= 0.0) {
      depleted = true;
      emit(EventKind::BatteryDepleted, k);
    }
  }
  if (drones_[0].landed && drones_[1].landed) {
    cause_ = TerminalCause::BothLanded;
  } else if (depleted) {
    cause_ = TerminalCause::BatteryDepleted;
  } else if (clock_ >= cfg_.world.max_steps) {
    cause_ = TerminalCause::Truncated;
  }
  terminal_ = cause_ != TerminalCause::None;
  out.terminal = terminal_;
  out.cause = cause_;
  return out;
}

World new_world(const RunConfig& cfg, std::uint64_t seed) {
  World w(cfg, seed);
  w.reset(seed);
  return w;
}

}  // namespace ceda
