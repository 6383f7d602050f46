#include <doctest.h>

#include <set>

#include "ceda/world.hpp"

using namespace ceda;

namespace {

RunConfig open_config(int w = 8, int h = 8) {
  RunConfig cfg;
  cfg.world.width = w;
  cfg.world.height = h;
  cfg.world.obstacle_count = 0;
  cfg.world.max_steps = 100;
  cfg.triage.n_init = 0;
  cfg.triage.max_patients = 2;
  cfg.triage.spawn_interval = 1000;
  cfg.hazards.wind_zone_count = 0;
  cfg.hazards.lowsig_zone_count = 0;
  return cfg;
}

Patient waiting_patient(int id, Cell loc) {
  Patient p;
  p.id = id;
  p.loc = loc;
  p.spawn_level = TriageLevel::Urgent;
  p.a = 0.05;
  p.b = 3.0;
  p.theta_serious = 0.5;
  p.theta_critical = 0.2;
  p.timer_remaining = 100;
  return p;
}

Action random_action(Rng& rng) { return static_cast<Action>(rng.below(kActionCount)); }

}  // namespace

TEST_SUITE("world") {
  TEST_CASE("obstacle count matches the configuration") {
    RunConfig cfg;
    const World w = new_world(cfg, 7);
    CHECK(w.grid().obstacle_count() == 200);
    for (int k = 0; k < kAgents; ++k) {
      CHECK_FALSE(w.grid().obstacle(cfg.world.start(k)));
      CHECK_FALSE(w.grid().obstacle(cfg.world.landing(k)));
    }
  }

  TEST_CASE("zero obstacles on a 5x5 grid") {
    RunConfig cfg = open_config(5, 5);
    CHECK(new_world(cfg, 0).grid().obstacle_count() == 0);
  }

  TEST_CASE("identical config and seed give identical worlds") {
    RunConfig cfg;
    CHECK(new_world(cfg, 3) == new_world(cfg, 3));
    CHECK(new_world(cfg, 3).grid().obstacle_cells() == new_world(cfg, 3).grid().obstacle_cells());
  }

  TEST_CASE("infeasible obstacle count is a configuration error") {
    RunConfig cfg = open_config(4, 4);
    cfg.world.obstacle_count = 12;
    CHECK_THROWS_AS(World(cfg, 1), ConfigError);
  }

  TEST_CASE("landing at the own zone freezes the drone") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = w.drone(0).landing_zone;
    const auto out = w.step({Action::Land, Action::Right});
    CHECK(out.count(EventKind::Landed, 0) == 1);
    CHECK(w.drone(0).landed);
    const double battery = w.drone(0).battery;
    const Cell pos = w.drone(0).pos;
    w.step({Action::Right, Action::Left});
    CHECK(w.drone(0).battery == battery);
    CHECK(w.drone(0).pos == pos);
  }

  TEST_CASE("landing elsewhere is invalid and does not move") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    const Cell before = w.drone(0).pos;
    const auto out = w.step({Action::Land, Action::Up});
    CHECK(out.count(EventKind::InvalidLand, 0) == 1);
    CHECK_FALSE(w.drone(0).landed);
    CHECK(w.drone(0).pos == before);
  }

  TEST_CASE("forced wind failure keeps position and drains wind rate") {
    RunConfig cfg = open_config();
    cfg.hazards.wind_fail_prob = 1.0;
    World w(cfg, 1);
    w.reset(1);
    const Cell start = w.drone(0).pos;
    w.mutable_grid().set_wind(start);
    const auto out = w.step({Action::Right, Action::Up});
    CHECK(out.count(EventKind::ActionFailed, 0) == 1);
    CHECK(w.drone(0).pos == start);
    CHECK(w.drone(0).battery == doctest::Approx(100.0 - 0.3));
  }

  TEST_CASE("forced low-signal failure") {
    RunConfig cfg = open_config();
    cfg.hazards.lowsig_fail_prob = 1.0;
    World w(cfg, 1);
    w.reset(1);
    const Cell start = w.drone(1).pos;
    w.mutable_grid().set_lowsig(start);
    const auto out = w.step({Action::Right, Action::Up});
    CHECK(out.count(EventKind::ActionFailed, 1) == 1);
    CHECK(w.drone(1).pos == start);
    CHECK(w.drone(1).battery == doctest::Approx(100.0 - 0.1));
  }

  TEST_CASE("moving into an obstacle or off the board is blocked") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    const Cell p0 = w.drone(0).pos;
    w.mutable_grid().set_obstacle({p0.x + 1, p0.y});
    auto out = w.step({Action::Right, Action::Up});
    CHECK(out.count(EventKind::ObstacleCollision, 0) == 1);
    CHECK(w.drone(0).pos == p0);
    w.mutable_drone(0).pos = {0, 3};
    out = w.step({Action::Left, Action::Up});
    CHECK(out.count(EventKind::ObstacleCollision, 0) == 1);
    CHECK(w.drone(0).pos == Cell{0, 3});
  }

  TEST_CASE("battery arithmetic is exact outside wind") {
    RunConfig cfg = open_config();
    cfg.world.max_steps = 1000;
    World w(cfg, 1);
    w.reset(1);
    for (int k = 1; k <= 475; ++k) {
      const Action a = k % 2 ? Action::Down : Action::Up;
      w.step({a, a});
      CHECK(w.drone(0).battery == 100.0 - k * 0.1);
    }
    // 475 clean steps leave 52.5, inside the 52-58 band reported for trained runs.
    CHECK(w.drone(0).battery == doctest::Approx(52.5));
  }

  TEST_CASE("two drones entering one cell: agent 1 is cancelled") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = {2, 3};
    w.mutable_drone(1).pos = {4, 3};
    const auto out = w.step({Action::Right, Action::Left});
    CHECK(out.count(EventKind::AgentCollision) == 1);
    CHECK(w.drone(0).pos == Cell{3, 3});
    CHECK(w.drone(1).pos == Cell{4, 3});
  }

  TEST_CASE("swapping cells is a collision for both") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = {2, 3};
    w.mutable_drone(1).pos = {3, 3};
    const auto out = w.step({Action::Right, Action::Left});
    CHECK(out.count(EventKind::AgentCollision) == 1);
    CHECK(w.drone(0).pos == Cell{2, 3});
    CHECK(w.drone(1).pos == Cell{3, 3});
  }

  TEST_CASE("a landed drone blocks its cell") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = w.drone(0).landing_zone;
    w.step({Action::Land, Action::Up});
    w.mutable_drone(1).pos = {1, 0};
    const auto out = w.step({Action::Up, Action::Left});
    CHECK(out.count(EventKind::ObstacleCollision, 1) == 1);
    CHECK(w.drone(1).pos == Cell{1, 0});
  }

  TEST_CASE("entering a patient cell delivers; agent 0 goes first") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_patients() = {waiting_patient(0, {3, 3})};
    w.mutable_drone(0).pos = {2, 3};
    w.mutable_drone(1).pos = {4, 3};
    const auto out = w.step({Action::Right, Action::Left});
    REQUIRE(out.count(EventKind::Delivered) == 1);
    CHECK(out.count(EventKind::Delivered, 0) == 1);
    CHECK(w.patients()[0].delivered);
    CHECK(w.patients()[0].final_weight >= 2);
  }

  TEST_CASE("stepping a terminal world throws") {
    RunConfig cfg = open_config();
    cfg.world.max_steps = 2;
    World w(cfg, 1);
    w.reset(1);
    w.step({Action::Up, Action::Up});
    const auto out = w.step({Action::Down, Action::Down});
    CHECK(out.terminal);
    CHECK(out.truncated());
    CHECK_THROWS_AS(w.step({Action::Up, Action::Up}), WorldStateError);
  }

  TEST_CASE("both landed ends the episode") {
    RunConfig cfg = open_config();
    World w(cfg, 1);
    w.reset(1);
    w.mutable_drone(0).pos = w.drone(0).landing_zone;
    w.mutable_drone(1).pos = w.drone(1).landing_zone;
    const auto out = w.step({Action::Land, Action::Land});
    CHECK(out.terminal);
    CHECK(out.cause == TerminalCause::BothLanded);
  }

  TEST_CASE("depleted battery ends the episode") {
    RunConfig cfg = open_config();
    cfg.world.battery_capacity = 0.25;
    World w(cfg, 1);
    w.reset(1);
    w.step({Action::Up, Action::Up});
    w.step({Action::Down, Action::Down});
    const auto out = w.step({Action::Up, Action::Up});
    CHECK(out.terminal);
    CHECK(out.cause == TerminalCause::BatteryDepleted);
    CHECK(out.count(EventKind::BatteryDepleted) == 2);
  }

  TEST_CASE("hazard layout bounds") {
    RunConfig cfg;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      World w = new_world(cfg, seed);
      CHECK(w.grid().wind_count() + w.grid().lowsig_count() <= 24);
      for (std::size_t i = 0; i < w.grid().cell_count(); ++i) {
        const Cell c = w.grid().cell_at(i);
        if (w.grid().obstacle(c)) {
          CHECK_FALSE(w.grid().wind(c));
          CHECK_FALSE(w.grid().lowsig(c));
        }
      }
    }
    cfg.hazards.wind_zone_count = 0;
    cfg.hazards.lowsig_zone_count = 0;
    World w = new_world(cfg, 1);
    CHECK(w.grid().wind_count() == 0);
    CHECK(w.grid().lowsig_count() == 0);
  }

  TEST_CASE("hazards only change at refresh clocks") {
    RunConfig cfg;
    World w = new_world(cfg, 12);
    Rng rng(4);
    int refreshes_seen = 0;
    while (!w.terminal() && w.clock() < 300) {
      const GridMap before = w.grid();
      w.step({random_action(rng), random_action(rng)});
      if (!(w.grid() == before)) {
        CHECK(w.clock() % cfg.hazards.refresh_interval == 0);
        ++refreshes_seen;
      }
    }
    CHECK(refreshes_seen > 0);
  }

  TEST_CASE("random rollouts keep the world invariants") {
    RunConfig cfg;
    cfg.world.width = 15;
    cfg.world.height = 15;
    cfg.world.obstacle_count = 30;
    cfg.world.max_steps = 400;
    Rng rng(99);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      World w = new_world(cfg, seed);
      std::set<int> delivered, expired;
      std::array<double, kAgents> battery{w.drone(0).battery, w.drone(1).battery};
      while (!w.terminal()) {
        const auto out = w.step({random_action(rng), random_action(rng)});
        for (int k = 0; k < kAgents; ++k) {
          CHECK_FALSE(w.grid().obstacle(w.drone(k).pos));
          CHECK(w.drone(k).battery <= battery[k]);
          battery[k] = w.drone(k).battery;
        }
        if (!w.drone(0).landed && !w.drone(1).landed) CHECK(w.drone(0).pos != w.drone(1).pos);
        for (const Event& e : out.events) {
          if (e.kind == EventKind::Delivered) CHECK(delivered.insert(e.patient).second);
          if (e.kind == EventKind::PatientExpired) CHECK(expired.insert(e.patient).second);
        }
      }
      for (int id : delivered) CHECK(expired.count(id) == 0);
    }
  }

  TEST_CASE("same seed and actions give identical outcomes") {
    RunConfig cfg;
    World a = new_world(cfg, 5), b = new_world(cfg, 5);
    Rng ra(1), rb(1);
    while (!a.terminal()) {
      const auto oa = a.step({random_action(ra), random_action(ra)});
      const auto ob = b.step({random_action(rb), random_action(rb)});
      REQUIRE(oa == ob);
    }
    CHECK(a == b);
  }
}
