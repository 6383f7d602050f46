#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ceda/config.hpp"
#include "ceda/grid.hpp"
#include "ceda/rng.hpp"
#include "ceda/triage.hpp"

namespace ceda {

inline constexpr int kAgents = 2;
inline constexpr int kActionCount = 5;

enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3, Land = 4 };

Cell apply_move(Cell c, Action a);
std::string_view action_name(Action a);

struct Drone {
  int id = 0;
  Cell pos;
  double battery = 0.0;
  bool landed = false;
  Cell landing_zone;
  // Battery is recomputed from these counts so k clean steps leave exactly
  // capacity - k * drain_base.
  int base_steps = 0;
  int wind_steps = 0;

  friend bool operator==(const Drone&, const Drone&) = default;
};

enum class EventKind {
  Spawned,
  Delivered,
  ObstacleCollision,
  AgentCollision,
  BatteryDepleted,
  Landed,
  PatientExpired,
  InvalidLand,
  ActionFailed,
};

std::string_view event_name(EventKind k);

struct Event {
  EventKind kind = EventKind::Spawned;
  int agent = -1;    // -1 for events not tied to one agent
  int patient = -1;  // -1 for events not tied to a patient
  int weight = 0;    // weight at the event for Spawned/Delivered/PatientExpired
  int timer = 0;     // remaining timer at delivery
  int clock = 0;     // post-step clock the event belongs to

  friend bool operator==(const Event&, const Event&) = default;
};

enum class TerminalCause { None, BothLanded, BatteryDepleted, Truncated };

struct StepOutcome {
  std::vector<Event> events;
  bool terminal = false;
  TerminalCause cause = TerminalCause::None;
  std::array<double, kAgents> reward{0.0, 0.0};

  bool truncated() const { return cause == TerminalCause::Truncated; }
  int count(EventKind k) const;
  int count(EventKind k, int agent) const;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

struct WorldStateError : std::logic_error {
  using std::logic_error::logic_error;
};

class World {
 public:
  // Builds the static map (obstacles) from map_seed. Call reset() before
  // stepping.
  World(const RunConfig& cfg, std::uint64_t map_seed);

  // Starts a fresh episode: drones home, patients and hazards resampled.
  void reset(std::uint64_t episode_seed);

  StepOutcome step(std::array<Action, kAgents> joint_action);

  // Re-lays the wind and low-signal zones from the hazard stream.
  void refresh_hazards();

  const RunConfig& config() const { return cfg_; }
  const GridMap& grid() const { return grid_; }
  const std::array<Drone, kAgents>& drones() const { return drones_; }
  const Drone& drone(int agent) const { return drones_.at(agent); }
  const std::vector<Patient>& patients() const { return patients_; }
  int clock() const { return clock_; }
  bool terminal() const { return terminal_; }
  TerminalCause terminal_cause() const { return cause_; }
  int spawned() const { return static_cast<int>(patients_.size()); }
  // Spawn events emitted by reset().
  const std::vector<Event>& reset_events() const { return reset_events_; }

  // Every patient has spawned and none is still waiting for service.
  bool mission_complete() const;
  int active_patient_count() const;
  // Patient whose cell is c and who is still awaiting delivery, or -1.
  int active_patient_at(Cell c) const;

  // Test hooks: place the world into a constructed state.
  GridMap& mutable_grid() { return grid_; }
  Drone& mutable_drone(int agent) { return drones_.at(agent); }
  std::vector<Patient>& mutable_patients() { return patients_; }
  void set_clock(int c) { clock_ = c; }

  friend bool operator==(const World&, const World&) = default;

 private:
  std::vector<Cell> free_spawn_cells() const;
  bool spawn_one(std::vector<Event>* events);
  void mark_zone(const std::vector<Cell>& path, bool wind);
  void drain(Drone& d, bool in_wind);

  RunConfig cfg_;
  GridMap grid_;
  std::array<Drone, kAgents> drones_{};
  std::vector<Patient> patients_;
  std::vector<Event> reset_events_;
  int clock_ = 0;
  bool terminal_ = false;
  TerminalCause cause_ = TerminalCause::None;
  Rng patient_rng_;
  Rng hazard_rng_;
  Rng failure_rng_;
};

// Map from (config, seed) and an episode reset with the same seed.
World new_world(const RunConfig& cfg, std::uint64_t seed);

}  // namespace ceda
