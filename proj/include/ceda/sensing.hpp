#pragma once

#include <cstddef>
#include <vector>

#include "ceda/world.hpp"

namespace ceda {

// Frozen feature-index map. Checkpoints depend on this layout; change it
// only together with a checkpoint format bump.
namespace features {
inline constexpr std::size_t kAgentBlock = 9;
inline constexpr std::size_t kPerPatient = 7;
inline constexpr std::size_t kViewSide = 5;
inline constexpr std::size_t kViewCells = kViewSide * kViewSide;
inline constexpr std::size_t kLocalBlock = 3 * kViewCells;

// Agent block.
inline constexpr std::size_t kSelfX = 0;
inline constexpr std::size_t kSelfY = 1;
inline constexpr std::size_t kBattery = 2;
inline constexpr std::size_t kLanded = 3;
inline constexpr std::size_t kOtherDx = 4;
inline constexpr std::size_t kOtherDy = 5;
inline constexpr std::size_t kLandingDirX = 6;
inline constexpr std::size_t kLandingDirY = 7;
inline constexpr std::size_t kClock = 8;

// Offsets within one patient slot.
inline constexpr std::size_t kPatientX = 0;
inline constexpr std::size_t kPatientY = 1;
inline constexpr std::size_t kPatientDirX = 2;
inline constexpr std::size_t kPatientDirY = 3;
inline constexpr std::size_t kPatientTimer = 4;
inline constexpr std::size_t kPatientDelivered = 5;
inline constexpr std::size_t kPatientWeight = 6;

constexpr std::size_t observation_size(std::size_t max_patients) {
  return kAgentBlock + kPerPatient * max_patients + kLocalBlock;
}
constexpr std::size_t patient_slot(std::size_t slot) { return kAgentBlock + kPerPatient * slot; }
constexpr std::size_t obstacle_view(std::size_t max_patients) {
  return kAgentBlock + kPerPatient * max_patients;
}
constexpr std::size_t wind_view(std::size_t max_patients) {
  return obstacle_view(max_patients) + kViewCells;
}
constexpr std::size_t lowsig_view(std::size_t max_patients) {
  return wind_view(max_patients) + kViewCells;
}
}  // namespace features

using Observation = std::vector<double>;
using JointState = std::vector<double>;

struct AblationMask {
  bool zero_lowsig_view = false;
  bool zero_wind_view = false;
  bool zero_battery = false;
  bool zero_weights = false;
  bool zero_timers = false;

  bool empty() const {
    return !(zero_lowsig_view || zero_wind_view || zero_battery || zero_weights || zero_timers);
  }
  friend bool operator==(const AblationMask&, const AblationMask&) = default;
};

// Parses a comma-separated list of lowsig, wind, battery, weights, timers
// (or "none"). Throws std::invalid_argument on an unknown group.
AblationMask parse_mask(const std::string& text);

// Per-agent local observation, 9 + 7M + 75 entries.
Observation observe(const World& world, int agent);

// [observe(agent), observe(other)].
JointState joint_state(const World& world, int agent);

// Zeroes the flagged feature groups in place. obs may be a single
// observation or a joint state; in the joint case both blocks are masked.
void apply_mask(std::vector<double>& obs, const AblationMask& mask, std::size_t max_patients);
std::vector<double> masked(std::vector<double> obs, const AblationMask& mask,
                           std::size_t max_patients);

}  // namespace ceda
