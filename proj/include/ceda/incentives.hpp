#pragma once

#include <array>

#include "ceda/config.hpp"
#include "ceda/world.hpp"

namespace ceda {

// Manhattan distance from the agent to its shaping target: the nearest
// active patient (lowest id on ties), or its landing zone once none remain.
int target_distance(const World& world, int agent);

double shaping(int distance_before, int distance_after, double lambda);
double shaping(const World& before, const World& after, int agent, double lambda);

double delivery_reward(double r_goal, int timer_remaining, int timer_max, int weight);

// Per-step components for one agent, kept separately so episode totals can
// be audited against their parts.
struct StepReward {
  double time_penalty = 0.0;
  double clean_bonus = 0.0;
  double shaping = 0.0;
  double wind_penalty = 0.0;
  double lowsig_penalty = 0.0;
  double low_battery_penalty = 0.0;
  double closeness_penalty = 0.0;
  double invalid_land_penalty = 0.0;

  double sum() const {
    return time_penalty + clean_bonus + shaping + wind_penalty + lowsig_penalty +
           low_battery_penalty + closeness_penalty + invalid_land_penalty;
  }
};

// State captured before World::step that the reward needs afterwards.
struct PreStep {
  std::array<int, kAgents> distance{};
  std::array<bool, kAgents> active{};
};

PreStep capture_pre_step(const World& world);

// Unclipped per-step reward; `after` is the world once the step has run.
StepReward step_reward(const World& after, int agent, const StepOutcome& outcome,
                       int distance_before, const RewardConfig& cfg);

double milestone_reward(const StepOutcome& outcome, int agent, int timer_max,
                        const RewardConfig& cfg);

double total_reward(double step_r, double milestone_r, double delta_max);

struct AgentReward {
  StepReward step;
  double step_clipped = 0.0;
  double milestone = 0.0;
  double total = 0.0;
};

// Scores both agents and writes the totals into outcome.reward. Agents that
// were already landed before the step only receive milestone terms.
std::array<AgentReward, kAgents> assign_rewards(const World& after, StepOutcome& outcome,
                                                const PreStep& pre, const RewardConfig& cfg);

}  // namespace ceda
