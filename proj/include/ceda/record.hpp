#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ceda/incentives.hpp"
#include "ceda/world.hpp"

namespace ceda {

enum class Fate { Active, Delivered, Expired };

struct PatientLedgerEntry {
  int id = 0;
  int spawn_weight = 0;
  // Weight at delivery or expiry; for patients still active when the
  // episode ends, the last observed weight.
  int final_weight = 0;
  Fate fate = Fate::Active;
  int spawn_clock = 0;
  int end_clock = 0;
  int delivered_by = -1;

  friend bool operator==(const PatientLedgerEntry&, const PatientLedgerEntry&) = default;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  int steps = 0;
  TerminalCause cause = TerminalCause::None;
  std::array<bool, kAgents> landed{};
  std::array<double, kAgents> end_battery{};
  // Obstacle collisions per agent plus shared agent-agent collisions.
  std::array<int, kAgents> obstacle_collisions{};
  int agent_collisions = 0;
  std::array<double, kAgents> reward{};
  std::vector<PatientLedgerEntry> patients;

  // Optional detail for tracing and audits.
  std::vector<Event> events;
  std::vector<std::array<Cell, kAgents>> positions;
  std::vector<std::array<AgentReward, kAgents>> reward_log;
  std::vector<int> wind_exposure;    // per cell, steps spent as wind zone
  std::vector<int> lowsig_exposure;  // per cell, steps spent as low-signal zone
  int grid_width = 0;
  int grid_height = 0;
  std::vector<Cell> obstacles;
  std::array<Cell, kAgents> landing_zones{};
  std::vector<Cell> patient_cells;

  int collisions() const { return obstacle_collisions[0] + obstacle_collisions[1] + agent_collisions; }
  bool both_landed() const { return landed[0] && landed[1]; }
  int spawned() const { return static_cast<int>(patients.size()); }
  int delivered() const;
  int expired() const;
  // Counts indexed by weight class 1..3 at position 0..2.
  std::array<int, 3> delivered_by_class() const;
  std::array<int, 3> expired_by_class() const;
  std::array<int, 3> spawned_by_class() const;
};

struct RecorderOptions {
  bool keep_events = false;
  bool keep_trace = false;  // positions, hazard exposure, layout
  bool keep_rewards = false;
};

// Builds an EpisodeRecord incrementally from reset + step outcomes.
class EpisodeRecorder {
 public:
  explicit EpisodeRecorder(RecorderOptions opts = {}) : opts_(opts) {}

  void begin(const World& world, std::uint64_t seed);
  void observe(const World& after, const StepOutcome& outcome,
               const std::array<AgentReward, kAgents>& rewards);
  EpisodeRecord finish(const World& world);

 private:
  void snapshot_hazards(const World& world);

  RecorderOptions opts_;
  EpisodeRecord rec_;
};

// Fraction of spawned patients delivered before expiry. nullopt when none spawned.
std::optional<double> utilization(const EpisodeRecord& rec);
// Delivered weight mass over spawned weight mass, terminal-event weights.
std::optional<double> triage_efficiency(const EpisodeRecord& rec);

// (sum x)^2 / (n * sum x^2); nullopt for empty input or all zeros.
std::optional<double> jain_index(std::span<const double> values);

}  // namespace ceda
