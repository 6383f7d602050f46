#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ceda/config.hpp"
#include "ceda/grid.hpp"
#include "ceda/rng.hpp"

namespace ceda {

enum class TriageLevel : int { Stable = 1, Urgent = 2, Critical = 3 };

struct Patient {
  int id = 0;
  Cell loc;
  TriageLevel spawn_level = TriageLevel::Stable;
  double a = 0.0;  // decay steepness
  double b = 0.0;  // decay centre
  double theta_serious = 0.0;
  double theta_critical = 0.0;
  int spawn_time = 0;
  int timer_remaining = 0;
  bool delivered = false;
  bool expired = false;
  // Weight recorded at the delivery or expiry instant.
  int final_weight = 0;

  bool active() const { return !delivered && !expired; }
  int elapsed(int clock) const { return clock - spawn_time; }

  friend bool operator==(const Patient&, const Patient&) = default;
};

// Logistic survival probability after t_elapsed steps.
double survival(double a, double b, double t_elapsed);
double survival(const Patient& p, double t_elapsed);

// Triage weight from the two survival thresholds, floored at the spawn level.
int escalation_weight(double s, double theta_serious, double theta_critical, int floor);
int current_weight(const Patient& p, int t_elapsed);

// Samples a new patient on a uniformly chosen free cell. Returns nullopt
// when free_cells is empty (the spawn is skipped).
std::optional<Patient> spawn_patient(Rng& rng, std::span<const Cell> free_cells, int clock,
                                     int id, const TriageConfig& cfg);

struct ExpiryEvent {
  int patient = 0;
  int weight = 0;
};

// Advances every active timer by one step. The clock is the post-step
// clock, used for the weight recorded at expiry.
std::vector<ExpiryEvent> tick_all(std::vector<Patient>& pool, int clock);

// Clocks (> 0) at which the spawn schedule adds a patient.
bool spawn_due(const TriageConfig& cfg, int clock, int spawned_so_far);

}  // namespace ceda
