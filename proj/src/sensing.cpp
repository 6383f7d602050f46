#include "ceda/sensing.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ceda {

AblationMask parse_mask(const std::string& text) {
  AblationMask m;
  std::string item;
  auto take = [&](const std::string& s) {
    if (s.empty() || s == "none") return;
    if (s == "lowsig" || s == "network") {
      m.zero_lowsig_view = true;
    } else if (s == "wind") {
      m.zero_wind_view = true;
    } else if (s == "battery") {
      m.zero_battery = true;
    } else if (s == "weights") {
      m.zero_weights = true;
    } else if (s == "timers") {
      m.zero_timers = true;
    } else {
      throw std::invalid_argument("unknown mask group '" + s +
                                  "' (expected lowsig, wind, battery, weights, timers)");
    }
  };
  for (char c : text) {
    if (c == ',') {
      take(item);
      item.clear();
    } else if (c != ' ') {
      item.push_back(c);
    }
  }
  take(item);
  return m;
}

Observation observe(const World& world, int agent) {
  using namespace features;
  const auto& cfg = world.config();
  const GridMap& grid = world.grid();
  const std::size_t m = static_cast<std::size_t>(cfg.triage.max_patients);
  Observation obs(observation_size(m), 0.0);

  const Drone& self = world.drone(agent);
  const Drone& other = world.drone(1 - agent);
  const double sx = std::max(1, grid.width() - 1);
  const double sy = std::max(1, grid.height() - 1);

  obs[kSelfX] = self.pos.x / sx;
  obs[kSelfY] = self.pos.y / sy;
  obs[kBattery] = std::clamp(self.battery / cfg.world.battery_capacity, 0.0, 1.0);
  obs[kLanded] = self.landed ? 1.0 : 0.0;
  obs[kOtherDx] = (other.pos.x - self.pos.x) / sx;
  obs[kOtherDy] = (other.pos.y - self.pos.y) / sy;
  obs[kLandingDirX] = sign_of(self.landing_zone.x - self.pos.x);
  obs[kLandingDirY] = sign_of(self.landing_zone.y - self.pos.y);
  obs[kClock] = std::min(1.0, static_cast<double>(world.clock()) / cfg.world.max_steps);

  // Slots follow spawn order; unspawned and expired patients stay zero.
  for (const Patient& p : world.patients()) {
    if (p.id >= static_cast<int>(m) || p.expired) continue;
    const std::size_t base = patient_slot(static_cast<std::size_t>(p.id));
    obs[base + kPatientX] = p.loc.x / sx;
    obs[base + kPatientY] = p.loc.y / sy;
    obs[base + kPatientTimer] = static_cast<double>(p.timer_remaining) / cfg.triage.timer_max;
    const int w = p.delivered ? p.final_weight : current_weight(p, p.elapsed(world.clock()));
    obs[base + kPatientWeight] = static_cast<double>(w) / cfg.triage.w_max;
    if (p.delivered) {
      obs[base + kPatientDelivered] = 1.0;
    } else {
      obs[base + kPatientDirX] = sign_of(p.loc.x - self.pos.x);
      obs[base + kPatientDirY] = sign_of(p.loc.y - self.pos.y);
    }
  }

  const int r = static_cast<int>(kViewSide / 2);
  const std::size_t ob = obstacle_view(m);
  const std::size_t wb = wind_view(m);
  const std::size_t lb = lowsig_view(m);
  std::size_t i = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx, ++i) {
      const Cell c{self.pos.x + dx, self.pos.y + dy};
      if (!grid.in_bounds(c)) {
        obs[ob + i] = 1.0;
        continue;
      }
      obs[ob + i] = grid.obstacle(c) ? 1.0 : 0.0;
      obs[wb + i] = grid.wind(c) ? 1.0 : 0.0;
      obs[lb + i] = grid.lowsig(c) ? 1.0 : 0.0;
    }
  }
  return obs;
}

JointState joint_state(const World& world, int agent) {
  JointState s = observe(world, agent);
  const Observation o = observe(world, 1 - agent);
  s.insert(s.end(), o.begin(), o.end());
  return s;
}

void apply_mask(std::vector<double>& obs, const AblationMask& mask, std::size_t max_patients) {
  using namespace features;
  const std::size_t n = observation_size(max_patients);
  if (obs.size() % n != 0) {
    throw std::invalid_argument("apply_mask: vector length " + std::to_string(obs.size()) +
                                " is not a multiple of the observation size " +
                                std::to_string(n));
  }
  for (std::size_t off = 0; off < obs.size(); off += n) {
    auto zero = [&](std::size_t from, std::size_t count) {
      std::fill_n(obs.begin() + static_cast<std::ptrdiff_t>(off + from), count, 0.0);
    };
    if (mask.zero_lowsig_view) zero(lowsig_view(max_patients), kViewCells);
    if (mask.zero_wind_view) zero(wind_view(max_patients), kViewCells);
    if (mask.zero_battery) zero(kBattery, 1);
    for (std::size_t s = 0; s < max_patients; ++s) {
      if (mask.zero_weights) zero(patient_slot(s) + kPatientWeight, 1);
      if (mask.zero_timers) zero(patient_slot(s) + kPatientTimer, 1);
    }
  }
}

std::vector<double> masked(std::vector<double> obs, const AblationMask& mask,
                           std::size_t max_patients) {
  apply_mask(obs, mask, max_patients);
  return obs;
}

}  // namespace ceda
