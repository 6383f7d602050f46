#include <doctest.h>

#include "ceda/sensing.hpp"

using namespace ceda;
using namespace ceda::features;

namespace {

std::size_t differing(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

// Observation with every feature set to a nonzero marker, so mask counts are exact.
std::vector<double> marked(std::size_t m) {
  std::vector<double> v(observation_size(m));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 + static_cast<double>(i);
  return v;
}

}  // namespace

TEST_SUITE("sensing") {
  TEST_CASE("observation and joint lengths for M = 8") {
    CHECK(observation_size(8) == 140);
    RunConfig cfg;
    const World w = new_world(cfg, 1);
    CHECK(observe(w, 0).size() == 140);
    CHECK(observe(w, 1).size() == 140);
    CHECK(joint_state(w, 0).size() == 280);
  }

  TEST_CASE("frozen feature index map") {
    CHECK(kBattery == 2);
    CHECK(kClock == 8);
    CHECK(patient_slot(0) == 9);
    CHECK(patient_slot(7) == 58);
    CHECK(obstacle_view(8) == 65);
    CHECK(wind_view(8) == 90);
    CHECK(lowsig_view(8) == 115);
  }

  TEST_CASE("unspawned slots are zero and values are normalized") {
    RunConfig cfg;
    World w = new_world(cfg, 2);
    const Observation o = observe(w, 0);
    for (std::size_t slot = 4; slot < 8; ++slot) {
      for (std::size_t j = 0; j < kPerPatient; ++j) CHECK(o[patient_slot(slot) + j] == 0.0);
    }
    for (std::size_t slot = 0; slot < 4; ++slot) {
      CHECK(o[patient_slot(slot) + kPatientTimer] == 1.0);
      CHECK(o[patient_slot(slot) + kPatientWeight] > 0.0);
    }
    for (double v : o) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
    CHECK(o[kBattery] == 1.0);
  }

  TEST_CASE("corner agent sees the out-of-bounds ring as obstacles") {
    RunConfig cfg;
    cfg.world.obstacle_count = 0;
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = {0, 0};
    const Observation o = observe(w, 0);
    const std::size_t base = obstacle_view(8);
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        const std::size_t i = base + (dy + 2) * 5 + (dx + 2);
        const bool outside = dx < 0 || dy < 0;
        CHECK(o[i] == (outside ? 1.0 : 0.0));
        CHECK(o[wind_view(8) + (dy + 2) * 5 + (dx + 2)] <= (outside ? 0.0 : 1.0));
      }
    }
  }

  TEST_CASE("joint state is the concatenation and swaps with the agent") {
    RunConfig cfg;
    const World w = new_world(cfg, 9);
    const Observation o0 = observe(w, 0);
    const Observation o1 = observe(w, 1);
    const JointState j0 = joint_state(w, 0);
    const JointState j1 = joint_state(w, 1);
    CHECK(std::vector<double>(j0.begin(), j0.begin() + 140) == o0);
    CHECK(std::vector<double>(j0.begin() + 140, j0.end()) == o1);
    CHECK(std::vector<double>(j1.begin(), j1.begin() + 140) == o1);
    CHECK(std::vector<double>(j1.begin() + 140, j1.end()) == o0);
  }

  TEST_CASE("observe is pure") {
    RunConfig cfg;
    const World w = new_world(cfg, 4);
    CHECK(observe(w, 1) == observe(w, 1));
  }

  TEST_CASE("mask feature counts") {
    const std::size_t m = 8;
    const auto base = marked(m);
    AblationMask mask;
    CHECK(masked(base, mask, m) == base);

    mask = {};
    mask.zero_battery = true;
    CHECK(differing(base, masked(base, mask, m)) == 1);
    CHECK(masked(base, mask, m)[kBattery] == 0.0);

    mask = {};
    mask.zero_weights = true;
    CHECK(differing(base, masked(base, mask, m)) == 8);

    mask = {};
    mask.zero_timers = true;
    CHECK(differing(base, masked(base, mask, m)) == 8);

    mask = {};
    mask.zero_wind_view = true;
    CHECK(differing(base, masked(base, mask, m)) == 25);

    mask = {};
    mask.zero_lowsig_view = true;
    const auto lowsig = masked(base, mask, m);
    CHECK(differing(base, lowsig) == 25);
    for (std::size_t i = lowsig_view(m); i < lowsig_view(m) + 25; ++i) CHECK(lowsig[i] == 0.0);
  }

  TEST_CASE("masking a joint state covers both blocks and is idempotent") {
    const std::size_t m = 4;
    auto joint = marked(m);
    const auto second = marked(m);
    joint.insert(joint.end(), second.begin(), second.end());
    AblationMask mask = parse_mask("battery,weights,timers,wind,lowsig");
    const auto once = masked(joint, mask, m);
    CHECK(once.size() == joint.size());
    CHECK(differing(joint, once) == 2 * (1 + 4 + 4 + 25 + 25));
    CHECK(masked(once, mask, m) == once);
  }

  TEST_CASE("parse_mask") {
    CHECK(parse_mask("none").empty());
    CHECK(parse_mask("").empty());
    CHECK(parse_mask("network").zero_lowsig_view);
    CHECK(parse_mask("battery").zero_battery);
    CHECK_THROWS_AS(parse_mask("gps"), std::invalid_argument);
  }
}
