#include "ceda/record.hpp"

#include <algorithm>

namespace ceda {
namespace {

std::array<int, 3> tally(const std::vector<PatientLedgerEntry>& ps, std::optional<Fate> fate,
                         bool by_spawn) {
  std::array<int, 3> out{};
  for (const auto& p : ps) {
    if (fate && p.fate != *fate) continue;
    const int w = by_spawn ? p.spawn_weight : p.final_weight;
    if (w >= 1 && w <= 3) ++out[w - 1];
  }
  return out;
}

}  // namespace

int EpisodeRecord::delivered() const {
  return static_cast<int>(std::count_if(patients.begin(), patients.end(),
                                        [](const auto& p) { return p.fate == Fate::Delivered; }));
}

int EpisodeRecord::expired() const {
  return static_cast<int>(std::count_if(patients.begin(), patients.end(),
                                        [](const auto& p) { return p.fate == Fate::Expired; }));
}

std::array<int, 3> EpisodeRecord::delivered_by_class() const {
  return tally(patients, Fate::Delivered, false);
}
std::array<int, 3> EpisodeRecord::expired_by_class() const {
  return tally(patients, Fate::Expired, false);
}
std::array<int, 3> EpisodeRecord::spawned_by_class() const {
  return tally(patients, std::nullopt, true);
}

void EpisodeRecorder::begin(const World& world, std::uint64_t seed) {
  rec_ = EpisodeRecord{};
  rec_.seed = seed;
  for (const Event& e : world.reset_events()) {
    if (e.kind != EventKind::Spawned) continue;
    rec_.patients.push_back({e.patient, e.weight, e.weight, Fate::Active, e.clock, e.clock, -1});
    if (opts_.keep_events) rec_.events.push_back(e);
  }
  if (opts_.keep_trace) {
    const GridMap& g = world.grid();
    rec_.grid_width = g.width();
    rec_.grid_height = g.height();
    rec_.obstacles = g.obstacle_cells();
    rec_.landing_zones = {world.drone(0).landing_zone, world.drone(1).landing_zone};
    rec_.wind_exposure.assign(g.cell_count(), 0);
    rec_.lowsig_exposure.assign(g.cell_count(), 0);
    rec_.positions.push_back({world.drone(0).pos, world.drone(1).pos});
    snapshot_hazards(world);
  }
}

void EpisodeRecorder::snapshot_hazards(const World& world) {
  const GridMap& g = world.grid();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Cell c = g.cell_at(i);
    rec_.wind_exposure[i] += g.wind(c) ? 1 : 0;
    rec_.lowsig_exposure[i] += g.lowsig(c) ? 1 : 0;
  }
}

void EpisodeRecorder::observe(const World& after, const StepOutcome& outcome,
                              const std::array<AgentReward, kAgents>& rewards) {
  for (const Event& e : outcome.events) {
    switch (e.kind) {
      case EventKind::Spawned:
        rec_.patients.push_back({e.patient, e.weight, e.weight, Fate::Active, e.clock, e.clock, -1});
        break;
      case EventKind::Delivered: {
        auto& p = rec_.patients.at(e.patient);
        p.fate = Fate::Delivered;
        p.final_weight = e.weight;
        p.end_clock = e.clock;
        p.delivered_by = e.agent;
        break;
      }
      case EventKind::PatientExpired: {
        auto& p = rec_.patients.at(e.patient);
        p.fate = Fate::Expired;
        p.final_weight = e.weight;
        p.end_clock = e.clock;
        break;
      }
      case EventKind::ObstacleCollision:
        ++rec_.obstacle_collisions[e.agent];
        break;
      case EventKind::AgentCollision:
        ++rec_.agent_collisions;
        break;
      default:
        break;
    }
    if (opts_.keep_events) rec_.events.push_back(e);
  }
  for (int k = 0; k < kAgents; ++k) rec_.reward[k] += outcome.reward[k];
  if (opts_.keep_rewards) rec_.reward_log.push_back(rewards);
  if (opts_.keep_trace) {
    rec_.positions.push_back({after.drone(0).pos, after.drone(1).pos});
    snapshot_hazards(after);
  }
}

EpisodeRecord EpisodeRecorder::finish(const World& world) {
  rec_.steps = world.clock();
  rec_.cause = world.terminal_cause();
  for (int k = 0; k < kAgents; ++k) {
    rec_.landed[k] = world.drone(k).landed;
    rec_.end_battery[k] = world.drone(k).battery;
  }
  for (auto& entry : rec_.patients) {
    if (entry.fate != Fate::Active) continue;
    const Patient& p = world.patients().at(entry.id);
    entry.final_weight = current_weight(p, p.elapsed(world.clock()));
    entry.end_clock = world.clock();
  }
  if (opts_.keep_trace) {
    for (const Patient& p : world.patients()) rec_.patient_cells.push_back(p.loc);
  }
  return std::move(rec_);
}

std::optional<double> utilization(const EpisodeRecord& rec) {
  if (rec.patients.empty()) return std::nullopt;
  return static_cast<double>(rec.delivered()) / static_cast<double>(rec.spawned());
}

std::optional<double> triage_efficiency(const EpisodeRecord& rec) {
  if (rec.patients.empty()) return std::nullopt;
  double delivered = 0.0;
  double total = 0.0;
  for (const auto& p : rec.patients) {
    total += p.final_weight;
    if (p.fate == Fate::Delivered) delivered += p.final_weight;
  }
  if (total <= 0.0) return std::nullopt;
  return delivered / total;
}

std::optional<double> jain_index(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  double sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
  }
  if (sq == 0.0) return std::nullopt;
  return (sum * sum) / (static_cast<double>(values.size()) * sq);
}

}  // namespace ceda
