#include "ceda/incentives.hpp"

#include <algorithm>
#include <limits>

namespace ceda {

int target_distance(const World& world, int agent) {
  const Drone& d = world.drone(agent);
  int best = std::numeric_limits<int>::max();
  for (const Patient& p : world.patients()) {
    if (!p.active()) continue;
    best = std::min(best, manhattan(d.pos, p.loc));
  }
  if (best == std::numeric_limits<int>::max()) best = manhattan(d.pos, d.landing_zone);
  return best;
}

double shaping(int distance_before, int distance_after, double lambda) {
  return lambda * static_cast<double>(distance_before - distance_after);
}

double shaping(const World& before, const World& after, int agent, double lambda) {
  return shaping(target_distance(before, agent), target_distance(after, agent), lambda);
}

double delivery_reward(double r_goal, int timer_remaining, int timer_max, int weight) {
  return r_goal * (static_cast<double>(timer_remaining) / timer_max) * weight;
}

PreStep capture_pre_step(const World& world) {
  PreStep pre;
  for (int k = 0; k < kAgents; ++k) {
    pre.distance[k] = target_distance(world, k);
    pre.active[k] = !world.drone(k).landed;
  }
  return pre;
}

StepReward step_reward(const World& after, int agent, const StepOutcome& outcome,
                       int distance_before, const RewardConfig& cfg) {
  const Drone& d = after.drone(agent);
  const Drone& other = after.drone(1 - agent);
  const GridMap& grid = after.grid();
  const bool wind = grid.wind(d.pos);
  const bool lowsig = grid.lowsig(d.pos);

  StepReward r;
  r.time_penalty = -cfg.delta;
  if (!wind && !lowsig) r.clean_bonus = cfg.beta;
  r.shaping = shaping(distance_before, target_distance(after, agent), cfg.lambda);
  if (wind) r.wind_penalty = -cfg.gamma_w;
  if (lowsig) r.lowsig_penalty = -cfg.gamma_s;
  if (d.battery < after.config().world.battery_low) r.low_battery_penalty = -cfg.gamma_b;
  if (manhattan(d.pos, other.pos) < cfg.r_close) r.closeness_penalty = -cfg.closeness;
  if (outcome.count(EventKind::InvalidLand, agent) > 0) {
    r.invalid_land_penalty = -cfg.invalid_land_penalty;
  }
  return r;
}

double milestone_reward(const StepOutcome& outcome, int agent, int timer_max,
                        const RewardConfig& cfg) {
  double r = 0.0;
  bool crashed = false;
  int expiries = 0;
  for (const Event& e : outcome.events) {
    switch (e.kind) {
      case EventKind::Delivered:
        if (e.agent == agent) r += delivery_reward(cfg.r_goal, e.timer, timer_max, e.weight);
        break;
      case EventKind::ObstacleCollision:
        crashed = crashed || e.agent == agent;
        break;
      case EventKind::AgentCollision:
        crashed = true;
        break;
      case EventKind::BatteryDepleted:
        if (e.agent == agent) r -= cfg.r_bat;
        break;
      case EventKind::Landed:
        if (e.agent == agent) r += cfg.r_land;
        break;
      case EventKind::PatientExpired:
        ++expiries;
        break;
      default:
        break;
    }
  }
  if (crashed) r -= cfg.r_crash;
  r -= expiries * (cfg.p_death / 2.0);
  return r;
}

double total_reward(double step_r, double milestone_r, double delta_max) {
  return std::clamp(step_r, -delta_max, delta_max) + milestone_r;
}

std::array<AgentReward, kAgents> assign_rewards(const World& after, StepOutcome& outcome,
                                                const PreStep& pre, const RewardConfig& cfg) {
  std::array<AgentReward, kAgents> out{};
  const int timer_max = after.config().triage.timer_max;
  for (int k = 0; k < kAgents; ++k) {
    AgentReward& r = out[k];
    if (pre.active[k]) {
      r.step = step_reward(after, k, outcome, pre.distance[k], cfg);
      r.step_clipped = std::clamp(r.step.sum(), -cfg.delta_max, cfg.delta_max);
    }
    r.milestone = milestone_reward(outcome, k, timer_max, cfg);
    r.total = r.step_clipped + r.milestone;
    outcome.reward[k] = r.total;
  }
  return out;
}

}  // namespace ceda
