#include "ceda/schedulers.hpp"

#include <limits>

namespace ceda {

std::string_view baseline_name(Baseline b) {
  switch (b) {
    case Baseline::NaiveNnpw: return "naive-nnpw";
    case Baseline::SmartEdf: return "smart-edf";
    case Baseline::SmartNnpw: return "smart-nnpw";
  }
  return "?";
}

std::optional<Baseline> parse_baseline(std::string_view name) {
  for (Baseline b : {Baseline::NaiveNnpw, Baseline::SmartEdf, Baseline::SmartNnpw}) {
    if (baseline_name(b) == name) return b;
  }
  return std::nullopt;
}

int CoordinationState::owner(int patient) const {
  const auto it = claims_.find(patient);
  return it == claims_.end() ? -1 : it->second;
}

void CoordinationState::claim(int agent, int patient) {
  release(agent);
  target_[agent] = patient;
  claims_[patient] = agent;
}

void CoordinationState::release(int agent) {
  if (target_[agent] >= 0) {
    const auto it = claims_.find(target_[agent]);
    if (it != claims_.end() && it->second == agent) claims_.erase(it);
  }
  target_[agent] = -1;
}

double nnpw_score(int weight, int timer_remaining) {
  return weight / (timer_remaining + kScoreEpsilon);
}

double proximity_score(int weight, int timer_remaining, int distance) {
  return nnpw_score(weight, timer_remaining) / (1.0 + distance);
}

Action greedy_step(Cell from, Cell to) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  if (dx == 0 && dy == 0) return Action::Land;
  const int ax = dx < 0 ? -dx : dx;
  const int ay = dy < 0 ? -dy : dy;
  if (ax >= ay) return dx > 0 ? Action::Right : Action::Left;
  return dy > 0 ? Action::Down : Action::Up;
}

namespace {

Action direction_to(Cell from, Cell next) {
  if (next.x > from.x) return Action::Right;
  if (next.x < from.x) return Action::Left;
  if (next.y > from.y) return Action::Down;
  return Action::Up;
}

// Heads home without landing: step toward the zone, and once there hop to
// the first free neighbour so the drone stays airborne.
Action hover_near_zone(const World& world, int agent) {
  const Drone& d = world.drone(agent);
  if (d.pos != d.landing_zone) return path_step(world, d.pos, d.landing_zone);
  const Cell other = world.drone(1 - agent).pos;
  for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
    const Cell c = apply_move(d.pos, a);
    if (world.grid().passable(c) && c != other) return a;
  }
  return Action::Up;
}

Action go_land(const World& world, int agent) {
  const Drone& d = world.drone(agent);
  if (d.pos == d.landing_zone) return Action::Land;
  return path_step(world, d.pos, d.landing_zone);
}

template <typename Better>
Action smart_action(const World& world, int agent, CoordinationState& coord,
                    const LandingRule& rule, Better better) {
  const Drone& d = world.drone(agent);
  coord.release(agent);
  if (coord.homing(agent) || landing_rule_fires(world, agent, rule)) {
    coord.set_homing(agent);
    return go_land(world, agent);
  }

  const Patient* best = nullptr;
  for (const Patient& p : world.patients()) {
    if (!p.active()) continue;
    const int owner = coord.owner(p.id);
    if (owner >= 0 && owner != agent) continue;
    if (!best || better(p, *best, d.pos, world.clock())) best = &p;
  }
  if (!best) return hover_near_zone(world, agent);
  coord.claim(agent, best->id);
  return path_step(world, d.pos, best->loc);
}

}  // namespace

Action path_step(const World& world, Cell from, Cell to) {
  if (from == to) return Action::Land;
  const GridMap& grid = world.grid();
  if (grid.passable(from) && grid.passable(to)) {
    if (auto path = astar_path(grid, from, to); path && path->size() >= 2) {
      return direction_to(from, (*path)[1]);
    }
  }
  return greedy_step(from, to);
}

bool landing_rule_fires(const World& world, int agent, const LandingRule& rule) {
  if (world.mission_complete()) return true;
  const Drone& d = world.drone(agent);
  const double drain = world.config().world.drain_base;
  const double needed = rule.reserve_factor * drain * manhattan(d.pos, d.landing_zone) +
                        rule.safety_margin_steps * drain;
  return d.battery <= needed;
}

Action naive_nnpw_action(const World& world, int agent) {
  const Drone& d = world.drone(agent);
  const Patient* best = nullptr;
  double best_score = -1.0;
  for (const Patient& p : world.patients()) {
    if (!p.active()) continue;
    const double s = nnpw_score(current_weight(p, p.elapsed(world.clock())), p.timer_remaining);
    if (s > best_score) {
      best = &p;
      best_score = s;
    }
  }
  if (best) return greedy_step(d.pos, best->loc);
  if (world.mission_complete()) return greedy_step(d.pos, d.landing_zone);
  if (d.pos == d.landing_zone) return hover_near_zone(world, agent);
  return greedy_step(d.pos, d.landing_zone);
}

Action smart_edf_action(const World& world, int agent, CoordinationState& coord,
                        const LandingRule& rule) {
  return smart_action(world, agent, coord, rule,
                      [](const Patient& a, const Patient& b, Cell pos, int) {
                        if (a.timer_remaining != b.timer_remaining) {
                          return a.timer_remaining < b.timer_remaining;
                        }
                        const int da = manhattan(pos, a.loc);
                        const int db = manhattan(pos, b.loc);
                        if (da != db) return da < db;
                        return a.id < b.id;
                      });
}

Action smart_nnpw_action(const World& world, int agent, CoordinationState& coord,
                         const LandingRule& rule) {
  return smart_action(world, agent, coord, rule,
                      [](const Patient& a, const Patient& b, Cell pos, int clock) {
                        const double sa = proximity_score(current_weight(a, a.elapsed(clock)),
                                                          a.timer_remaining, manhattan(pos, a.loc));
                        const double sb = proximity_score(current_weight(b, b.elapsed(clock)),
                                                          b.timer_remaining, manhattan(pos, b.loc));
                        if (sa != sb) return sa > sb;
                        return a.id < b.id;
                      });
}

Action baseline_action(Baseline b, const World& world, int agent, CoordinationState& coord,
                       const LandingRule& rule) {
  switch (b) {
    case Baseline::NaiveNnpw: return naive_nnpw_action(world, agent);
    case Baseline::SmartEdf: return smart_edf_action(world, agent, coord, rule);
    case Baseline::SmartNnpw: return smart_nnpw_action(world, agent, coord, rule);
  }
  return Action::Land;
}

}  // namespace ceda
