#include <doctest.h>

#include "ceda/incentives.hpp"

using namespace ceda;

namespace {

RunConfig quiet_config() {
  RunConfig cfg;
  cfg.world.width = 10;
  cfg.world.height = 10;
  cfg.world.obstacle_count = 0;
  cfg.triage.n_init = 0;
  cfg.triage.max_patients = 2;
  cfg.triage.spawn_interval = 1000;
  cfg.hazards.wind_zone_count = 0;
  cfg.hazards.lowsig_zone_count = 0;
  return cfg;
}

Patient patient_at(int id, Cell loc) {
  Patient p;
  p.id = id;
  p.loc = loc;
  p.a = 0.02;
  p.b = 5.0;
  p.theta_serious = 0.5;
  p.theta_critical = 0.2;
  p.timer_remaining = 200;
  return p;
}

}  // namespace

TEST_SUITE("incentives") {
  TEST_CASE("shaping of one cell closer with lambda 0.5") {
    CHECK(shaping(4, 3, 0.5) == 0.5);
    CHECK(shaping(3, 3, 0.5) == 0.0);

    RunConfig cfg = quiet_config();
    World before(cfg, 1);
    before.reset(1);
    before.mutable_patients() = {patient_at(0, {5, 1})};
    World after = before;
    after.step({Action::Right, Action::Up});
    CHECK(shaping(before, after, 0, 0.5) == 0.5);
  }

  TEST_CASE("shaping toward the landing zone once no patients remain") {
    RunConfig cfg = quiet_config();
    World before(cfg, 1);
    before.reset(1);
    before.mutable_drone(0).pos = {4, 4};
    World after = before;
    after.step({Action::Up, Action::Up});
    CHECK(target_distance(after, 0) == 7);
    CHECK(shaping(before, after, 0, 0.5) > 0.0);
  }

  TEST_CASE("closeness penalty uses a strict radius") {
    RunConfig cfg = quiet_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = {2, 5};
    w.mutable_drone(1).pos = {5, 5};
    StepOutcome none;
    CHECK(step_reward(w, 0, none, target_distance(w, 0), cfg.reward).closeness_penalty == -0.5);
    w.mutable_drone(1).pos = {6, 5};
    CHECK(step_reward(w, 0, none, target_distance(w, 0), cfg.reward).closeness_penalty == 0.0);
  }

  TEST_CASE("clean step toward target is -delta + beta + shaping only") {
    RunConfig cfg = quiet_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_patients() = {patient_at(0, {1, 6})};
    const PreStep pre = capture_pre_step(w);
    StepOutcome out = w.step({Action::Down, Action::Up});
    const auto r = assign_rewards(w, out, pre, cfg.reward);
    const double expected = -0.1 + 0.05 + 0.5;
    CHECK(r[0].step.sum() == doctest::Approx(expected).epsilon(1e-15));
    CHECK(r[0].step.wind_penalty == 0.0);
    CHECK(r[0].step.lowsig_penalty == 0.0);
    CHECK(r[0].step.low_battery_penalty == 0.0);
    CHECK(r[0].step.closeness_penalty == 0.0);
    CHECK(r[0].milestone == 0.0);
  }

  TEST_CASE("hazard and low-battery penalties") {
    RunConfig cfg = quiet_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_grid().set_wind(w.drone(0).pos);
    w.mutable_grid().set_lowsig(w.drone(0).pos);
    w.mutable_drone(0).battery = 10.0;
    StepOutcome none;
    const StepReward r = step_reward(w, 0, none, target_distance(w, 0), cfg.reward);
    CHECK(r.clean_bonus == 0.0);
    CHECK(r.wind_penalty == -0.5);
    CHECK(r.lowsig_penalty == -0.5);
    CHECK(r.low_battery_penalty == -0.3);
  }

  TEST_CASE("delivery reward examples and monotonicity") {
    CHECK(delivery_reward(100, 250, 250, 3) == 300.0);
    CHECK(delivery_reward(100, 0, 250, 3) == 0.0);
    for (int w = 1; w <= 3; ++w) {
      for (int t = 1; t <= 250; ++t) {
        CHECK(delivery_reward(100, t, 250, w) > delivery_reward(100, t - 1, 250, w));
        if (w > 1) CHECK(delivery_reward(100, t, 250, w) > delivery_reward(100, t, 250, w - 1));
      }
    }
  }

  TEST_CASE("total reward clips only the step component") {
    CHECK(total_reward(-9.7, 0.0, 2.0) == -2.0);
    CHECK(total_reward(0.3, 300.0, 2.0) == doctest::Approx(300.3).epsilon(1e-15));
    CHECK(total_reward(0.0, 0.0, 2.0) == 0.0);
    CHECK(total_reward(5.0, -100.0, 2.0) == -98.0);
  }

  TEST_CASE("one expiry costs each agent P_death / 2") {
    RewardConfig cfg;
    StepOutcome out;
    out.events.push_back({EventKind::PatientExpired, -1, 0, 2, 0, 10});
    CHECK(milestone_reward(out, 0, 250, cfg) == -50.0);
    CHECK(milestone_reward(out, 1, 250, cfg) == -50.0);
  }

  TEST_CASE("milestone terms") {
    RewardConfig cfg;
    StepOutcome out;
    out.events.push_back({EventKind::Delivered, 0, 3, 3, 250, 5});
    out.events.push_back({EventKind::Landed, 1, -1, 0, 0, 5});
    CHECK(milestone_reward(out, 0, 250, cfg) == 300.0);
    CHECK(milestone_reward(out, 1, 250, cfg) == 50.0);

    StepOutcome crash;
    crash.events.push_back({EventKind::AgentCollision, -1, -1, 0, 0, 5});
    crash.events.push_back({EventKind::ObstacleCollision, 0, -1, 0, 0, 5});
    CHECK(milestone_reward(crash, 0, 250, cfg) == -50.0);
    CHECK(milestone_reward(crash, 1, 250, cfg) == -50.0);

    StepOutcome dead;
    dead.events.push_back({EventKind::BatteryDepleted, 1, -1, 0, 0, 5});
    CHECK(milestone_reward(dead, 0, 250, cfg) == 0.0);
    CHECK(milestone_reward(dead, 1, 250, cfg) == -50.0);
  }

  TEST_CASE("already-landed agents only collect milestone terms") {
    RunConfig cfg = quiet_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = w.drone(0).landing_zone;
    w.step({Action::Land, Action::Up});
    const PreStep pre = capture_pre_step(w);
    CHECK_FALSE(pre.active[0]);
    StepOutcome out = w.step({Action::Up, Action::Down});
    const auto r = assign_rewards(w, out, pre, cfg.reward);
    CHECK(r[0].step_clipped == 0.0);
    CHECK(r[0].total == r[0].milestone);
  }
}
