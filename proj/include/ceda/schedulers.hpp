#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ceda/world.hpp"

namespace ceda {

inline constexpr double kScoreEpsilon = 1e-6;

enum class Baseline { NaiveNnpw, SmartEdf, SmartNnpw };

std::string_view baseline_name(Baseline b);
std::optional<Baseline> parse_baseline(std::string_view name);

// Patient -> agent claims shared by the Smart variants within one episode.
class CoordinationState {
 public:
  int target(int agent) const { return target_[agent]; }
  // -1 when unclaimed.
  int owner(int patient) const;
  void claim(int agent, int patient);
  void release(int agent);
  const std::map<int, int>& claims() const { return claims_; }
  // Once the landing rule fires the agent stays committed to landing.
  bool homing(int agent) const { return homing_[agent]; }
  void set_homing(int agent) { homing_[agent] = true; }

 private:
  std::array<int, kAgents> target_{-1, -1};
  std::array<bool, kAgents> homing_{false, false};
  std::map<int, int> claims_;
};

struct LandingRule {
  double reserve_factor = 1.5;
  // Extra battery kept in hand, in units of drain_base.
  double safety_margin_steps = 2.0;
};

// Weight over remaining timer.
double nnpw_score(int weight, int timer_remaining);
// NNPW score discounted by (1 + Manhattan distance).
double proximity_score(int weight, int timer_remaining, int distance);

// One greedy Manhattan step: along the axis with the larger gap, horizontal
// on ties. Returns Land when already at the target.
Action greedy_step(Cell from, Cell to);
// First move of the A* route, or greedy_step when no route exists.
Action path_step(const World& world, Cell from, Cell to);

bool landing_rule_fires(const World& world, int agent, const LandingRule& rule);

Action naive_nnpw_action(const World& world, int agent);
Action smart_edf_action(const World& world, int agent, CoordinationState& coord,
                        const LandingRule& rule);
Action smart_nnpw_action(const World& world, int agent, CoordinationState& coord,
                         const LandingRule& rule);

Action baseline_action(Baseline b, const World& world, int agent, CoordinationState& coord,
                       const LandingRule& rule);

}  // namespace ceda
