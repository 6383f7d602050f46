#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "ceda/config.hpp"

using namespace ceda;
namespace fs = std::filesystem;

TEST_SUITE("config") {
  TEST_CASE("empty file gives documented defaults") {
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg.learner.gamma == 0.99);
    CHECK(cfg.learner.learning_rate == 1e-4);
    CHECK(cfg.learner.episodes == 12000);
    CHECK(cfg.learner.buffer_capacity == 50000);
    CHECK(cfg.learner.batch_size == 128);
    CHECK(cfg.learner.target_sync == 10);
    CHECK(cfg.learner.hidden == std::vector<int>{256, 256, 128});
    CHECK(cfg.world.width == 50);
    CHECK(cfg.world.height == 50);
    CHECK(cfg.world.obstacle_count == 200);
    CHECK(cfg.world.max_steps == 800);
    CHECK(cfg.triage.n_init == 4);
    CHECK(cfg.triage.max_patients == 8);
    CHECK(cfg.triage.timer_max == 250);
    CHECK(cfg.hazards.refresh_interval == 30);
    CHECK(cfg.world.battery_low == 20.0);
  }

  TEST_CASE("gamma outside [0,1] is rejected with the line number") {
    try {
      parse_config_text("# header\nlearner.gamma = 1.5\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("unknown keys and type mismatches are errors") {
    CHECK_THROWS_AS(parse_config_text("world.nonsense = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("world.obstacles = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("world.grid = 50\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just some words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("hazards.wind_fail_prob = -0.1\n"), ConfigError);
  }

  TEST_CASE("grid size round-trips through the echo") {
    const RunConfig cfg = parse_config_text("world.grid = 50x50\n");
    const std::string echo = echo_config(cfg);
    CHECK(echo.find("world.grid = 50x50") != std::string::npos);
    const RunConfig again = parse_config_text(echo);
    CHECK(echo_config(again) == echo);
    CHECK(again.world.width == 50);
  }

  TEST_CASE("echo reproduces every key") {
    RunConfig cfg = parse_config_text(
        "world.grid = 20x12\nworld.start0 = 2,3\ntriage.urgent_a = 0.06,0.09\n"
        "learner.hidden = 32,16\nreward.lambda = 0.25\nlearner.learning_rate = 3e-4\n");
    const RunConfig again = parse_config_text(echo_config(cfg));
    for (const auto& key : config_keys()) {
      CHECK_MESSAGE(get_config_value(again, key) == get_config_value(cfg, key), key);
    }
    CHECK(again.world.start(0) == Cell{2, 3});
    CHECK(again.learner.learning_rate == 3e-4);
  }

  TEST_CASE("auto start and landing cells resolve to corners") {
    RunConfig cfg = parse_config_text("world.grid = 10x8\n");
    CHECK(cfg.world.landing(0) == Cell{0, 0});
    CHECK(cfg.world.landing(1) == Cell{9, 7});
    CHECK(cfg.world.start(0) == Cell{1, 1});
    CHECK(cfg.world.start(1) == Cell{8, 6});
  }
}

namespace {

struct CliResult {
  int code = 0;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string("CEDA_LOG=quiet ") + CEDA_CLI_PATH + " " + args + " 2> " +
                          err.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ceda_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kTinyConfig =
    "world.grid = 8x8\nworld.obstacles = 4\nworld.max_steps = 40\n"
    "triage.n_init = 1\ntriage.spawn_interval = 10\ntriage.max_patients = 2\n"
    "triage.timer_max = 30\nhazards.zone_length = 2\nlearner.episodes = 3\n"
    "learner.hidden = 8\nlearner.batch_size = 4\nlearner.buffer_capacity = 64\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("unknown subcommand and unknown flag exit with 2 and usage") {
    const fs::path dir = scratch("usage");
    auto r = run_cli("frobnicate", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = run_cli("baseline --policy smart-edf --csv x.csv --bogus 1", dir);
    CHECK(r.code == 2);
  }

  TEST_CASE("eval with a missing checkpoint names the path") {
    const fs::path dir = scratch("missing");
    const auto r = run_cli("eval --checkpoint /nonexistent/model.ckpt --episodes 1 --csv " +
                               (dir / "e.csv").string(),
                           dir);
    CHECK(r.code != 0);
    CHECK(r.err.find("/nonexistent/model.ckpt") != std::string::npos);
  }

  TEST_CASE("baseline runs without a checkpoint") {
    const fs::path dir = scratch("baseline");
    std::ofstream(dir / "tiny.cfg") << kTinyConfig;
    const auto r = run_cli("baseline --policy smart-edf --episodes 3 --config " +
                               (dir / "tiny.cfg").string() + " --csv " + (dir / "b.csv").string(),
                           dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "b.csv"));
  }

  TEST_CASE("train then eval, trace, stress and ablate on the checkpoint") {
    const fs::path dir = scratch("pipeline");
    std::ofstream(dir / "tiny.cfg") << kTinyConfig;
    const fs::path run = dir / "run";
    REQUIRE(run_cli("train --config " + (dir / "tiny.cfg").string() + " --seed 4 --out " +
                        run.string(),
                    dir)
                .code == 0);
    CHECK(fs::exists(run / "checkpoint.ckpt"));
    CHECK(fs::exists(run / "training_log.csv"));
    CHECK(fs::exists(run / "effective_config.txt"));
    const std::string ckpt = (run / "checkpoint.ckpt").string();
    CHECK(run_cli("eval --checkpoint " + ckpt + " --episodes 2 --seed 1 --csv " +
                      (dir / "e.csv").string() + " --mask battery",
                  dir)
              .code == 0);
    CHECK(run_cli("trace --checkpoint " + ckpt + " --seed 2 --svg " + (dir / "t.svg").string(), dir)
              .code == 0);
    CHECK(slurp(dir / "t.svg").find("<polyline") != std::string::npos);
    CHECK(run_cli("stress --checkpoint " + ckpt + " --episodes 1 --csv " +
                      (dir / "s.csv").string(),
                  dir)
              .code == 0);
    CHECK(run_cli("ablate --checkpoint " + ckpt + " --episodes 1 --workers 2 --csv " +
                      (dir / "a.csv").string(),
                  dir)
              .code == 0);

    // Re-running from the echoed config reproduces the log bitwise.
    const fs::path rerun = dir / "rerun";
    REQUIRE(run_cli("train --config " + (run / "effective_config.txt").string() +
                        " --seed 4 --out " + rerun.string(),
                    dir)
                .code == 0);
    CHECK(slurp(run / "training_log.csv") == slurp(rerun / "training_log.csv"));
    CHECK(slurp(run / "checkpoint.ckpt") == slurp(rerun / "checkpoint.ckpt"));
  }
}
