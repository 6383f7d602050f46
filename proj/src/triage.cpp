#include "ceda/triage.hpp"

#include <algorithm>
#include <cmath>

namespace ceda {

double survival(double a, double b, double t_elapsed) {
  return 1.0 / (1.0 + std::exp(a * t_elapsed - b));
}

double survival(const Patient& p, double t_elapsed) { return survival(p.a, p.b, t_elapsed); }

int escalation_weight(double s, double theta_serious, double theta_critical, int floor) {
  int w = 1;
  if (s < theta_critical) {
    w = 3;
  } else if (s < theta_serious) {
    w = 2;
  }
  return std::max(w, floor);
}

int current_weight(const Patient& p, int t_elapsed) {
  return escalation_weight(survival(p, t_elapsed), p.theta_serious, p.theta_critical,
                           static_cast<int>(p.spawn_level));
}

std::optional<Patient> spawn_patient(Rng& rng, std::span<const Cell> free_cells, int clock,
                                     int id, const TriageConfig& cfg) {
  if (free_cells.empty()) return std::nullopt;
  Patient p;
  p.id = id;
  p.loc = free_cells[rng.below(free_cells.size())];
  p.spawn_level = static_cast<TriageLevel>(1 + static_cast<int>(rng.below(3)));
  const LevelDecay& d = cfg.decay_for(static_cast<int>(p.spawn_level));
  p.a = rng.uniform(d.a_min, d.a_max);
  p.b = rng.uniform(d.b_min, d.b_max);
  do {
    p.theta_serious = rng.uniform(cfg.theta_serious_min, cfg.theta_serious_max);
    p.theta_critical = rng.uniform(cfg.theta_critical_min, cfg.theta_critical_max);
  } while (!(p.theta_critical < p.theta_serious - cfg.theta_margin));
  p.spawn_time = clock;
  p.timer_remaining = cfg.timer_max;
  return p;
}

std::vector<ExpiryEvent> tick_all(std::vector<Patient>& pool, int clock) {
  std::vector<ExpiryEvent> events;
  for (Patient& p : pool) {
    if (!p.active()) continue;
    if (--p.timer_remaining <= 0) {
      p.timer_remaining = 0;
      p.expired = true;
      p.final_weight = current_weight(p, p.elapsed(clock));
      events.push_back({p.id, p.final_weight});
    }
  }
  return events;
}

bool spawn_due(const TriageConfig& cfg, int clock, int spawned_so_far) {
  return clock > 0 && clock % cfg.spawn_interval == 0 && spawned_so_far < cfg.max_patients;
}

}  // namespace ceda
