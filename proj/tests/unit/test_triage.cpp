#include <doctest.h>

#include <cmath>

#include "ceda/config.hpp"
#include "ceda/triage.hpp"
#include "ceda/world.hpp"

using namespace ceda;

namespace {

std::vector<Cell> some_cells(int n) {
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) cells.push_back({i % 7, i / 7});
  return cells;
}

Patient make_patient(double a, double b, double ts, double tc, int level, int timer = 250) {
  Patient p;
  p.a = a;
  p.b = b;
  p.theta_serious = ts;
  p.theta_critical = tc;
  p.spawn_level = static_cast<TriageLevel>(level);
  p.timer_remaining = timer;
  return p;
}

}  // namespace

TEST_SUITE("triage") {
  TEST_CASE("survival examples") {
    CHECK(survival(0.1, 2.0, 20) == doctest::Approx(0.5).epsilon(1e-12));
    // Direct logistic evaluation, written out independently.
    const double s0 = 1.0 / (1.0 + std::exp(-3.0));
    CHECK(survival(0.1, 3.0, 0) == doctest::Approx(s0).epsilon(1e-14));
    CHECK(survival(0.1, 3.0, 0) == doctest::Approx(0.95257).epsilon(1e-5));
    CHECK(survival(0.2, 1.0, 30) == doctest::Approx(0.00669).epsilon(1e-3));
    CHECK(survival(0.2, 1.0, 30) == doctest::Approx(1.0 / (1.0 + std::exp(5.0))).epsilon(1e-14));
  }

  TEST_CASE("survival is strictly decreasing and stays inside (0,1)") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(0.02, 0.2);
      const double b = rng.uniform(1.0, 5.0);
      double prev = survival(a, b, 0);
      for (int t = 1; t <= 250; ++t) {
        const double s = survival(a, b, t);
        CHECK(s < prev);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        prev = s;
      }
    }
  }

  TEST_CASE("escalation weight case analysis") {
    CHECK(escalation_weight(0.80, 0.50, 0.20, 1) == 1);
    CHECK(escalation_weight(0.35, 0.50, 0.20, 1) == 2);
    CHECK(escalation_weight(0.10, 0.50, 0.20, 1) == 3);
    // Boundaries: S equal to a threshold falls in the upper band.
    CHECK(escalation_weight(0.50, 0.50, 0.20, 1) == 1);
    CHECK(escalation_weight(0.20, 0.50, 0.20, 1) == 2);
    // Spawn-level floor.
    CHECK(escalation_weight(0.80, 0.50, 0.20, 3) == 3);
    CHECK(escalation_weight(0.35, 0.50, 0.20, 3) == 3);
    CHECK(escalation_weight(0.80, 0.50, 0.20, 2) == 2);
  }

  TEST_CASE("spawned profiles respect level ranges and threshold separation") {
    TriageConfig cfg;
    Rng rng(11);
    const auto cells = some_cells(30);
    int seen[4] = {0, 0, 0, 0};
    for (int i = 0; i < 10000; ++i) {
      const auto p = spawn_patient(rng, cells, 5, i, cfg);
      REQUIRE(p);
      const int level = static_cast<int>(p->spawn_level);
      ++seen[level];
      const LevelDecay& d = cfg.decay_for(level);
      CHECK(p->a >= d.a_min);
      CHECK(p->a <= d.a_max);
      CHECK(p->b >= d.b_min);
      CHECK(p->b <= d.b_max);
      CHECK(p->theta_critical < p->theta_serious - 0.05);
      CHECK(p->theta_serious >= 0.40);
      CHECK(p->theta_serious <= 0.70);
      CHECK(p->theta_critical >= 0.10);
      CHECK(p->theta_critical <= 0.30);
      CHECK(p->timer_remaining == 250);
      CHECK(p->spawn_time == 5);
    }
    for (int level = 1; level <= 3; ++level) {
      CHECK(seen[level] > 3000);
      CHECK(seen[level] < 3700);
    }
  }

  TEST_CASE("critical spawns draw a in [0.10, 0.20]") {
    TriageConfig cfg;
    Rng rng(5);
    const auto cells = some_cells(4);
    int critical = 0;
    for (int i = 0; i < 500; ++i) {
      const auto p = spawn_patient(rng, cells, 0, i, cfg);
      if (p->spawn_level != TriageLevel::Critical) continue;
      ++critical;
      CHECK(p->a >= 0.10);
      CHECK(p->a <= 0.20);
    }
    CHECK(critical > 0);
  }

  TEST_CASE("spawning is deterministic and skips with no free cells") {
    TriageConfig cfg;
    Rng a(8), b(8);
    const auto cells = some_cells(10);
    CHECK(*spawn_patient(a, cells, 0, 0, cfg) == *spawn_patient(b, cells, 0, 0, cfg));
    CHECK_FALSE(spawn_patient(a, std::span<const Cell>{}, 0, 1, cfg).has_value());
  }

  TEST_CASE("current weight never decreases over random lifetimes") {
    TriageConfig cfg;
    Rng rng(21);
    const auto cells = some_cells(5);
    for (int i = 0; i < 1000; ++i) {
      const Patient p = *spawn_patient(rng, cells, 0, i, cfg);
      int prev = current_weight(p, 0);
      CHECK(prev >= static_cast<int>(p.spawn_level));
      for (int t = 1; t <= cfg.timer_max; ++t) {
        const int w = current_weight(p, t);
        CHECK(w >= prev);
        CHECK(w <= 3);
        prev = w;
      }
    }
  }

  TEST_CASE("tick_all expires at zero and leaves delivered patients alone") {
    std::vector<Patient> pool = {make_patient(0.1, 2, 0.5, 0.2, 1, 1),
                                 make_patient(0.1, 2, 0.5, 0.2, 1, 5)};
    pool[1].delivered = true;
    const auto events = tick_all(pool, 1);
    REQUIRE(events.size() == 1);
    CHECK(events[0].patient == 0);
    CHECK(pool[0].expired);
    CHECK(pool[0].timer_remaining == 0);
    CHECK(pool[1].timer_remaining == 5);
    CHECK(tick_all(pool, 2).empty());
  }

  TEST_CASE("unserved patient expires exactly timer_max steps after spawn") {
    std::vector<Patient> pool = {make_patient(0.02, 5, 0.5, 0.2, 1, 250)};
    pool[0].spawn_time = 3;
    int expired_at = -1;
    for (int clock = 4; clock < 600 && expired_at < 0; ++clock) {
      if (!tick_all(pool, clock).empty()) expired_at = clock;
    }
    CHECK(expired_at == 253);
  }

  TEST_CASE("spawn schedule with n_init 4, interval 75, M 8") {
    TriageConfig cfg;
    std::vector<int> fired;
    int spawned = cfg.n_init;
    for (int clock = 1; clock <= 800; ++clock) {
      if (spawn_due(cfg, clock, spawned)) {
        fired.push_back(clock);
        ++spawned;
      }
    }
    CHECK(fired == std::vector<int>{75, 150, 225, 300});
  }

  TEST_CASE("world follows the same spawn schedule") {
    RunConfig cfg;
    World w = new_world(cfg, 4);
    CHECK(w.spawned() == 4);
    std::vector<int> clocks;
    while (!w.terminal() && w.clock() < 400) {
      const int before = w.spawned();
      // Off-zone LAND is a no-op, so the drones stay put.
      w.step({Action::Land, Action::Land});
      if (w.spawned() > before) clocks.push_back(w.clock());
    }
    CHECK(clocks == std::vector<int>{75, 150, 225, 300});
  }
}
