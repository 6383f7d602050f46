#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceda/grid.hpp"

namespace ceda {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WorldConfig {
  int width = 50;
  int height = 50;
  int obstacle_count = 200;
  // Obstacles are static across episodes; this seed fixes the map.
  std::uint64_t map_seed = 1;
  int max_steps = 800;
  double battery_capacity = 100.0;
  double drain_base = 0.1;
  double drain_wind = 0.3;
  double battery_low = 20.0;
  // {-1,-1} means "auto": drone 0 starts at (1,1) and lands at (0,0),
  // drone 1 mirrors it in the opposite corner.
  Cell start0{-1, -1};
  Cell start1{-1, -1};
  Cell landing0{-1, -1};
  Cell landing1{-1, -1};

  Cell start(int agent) const;
  Cell landing(int agent) const;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

struct LevelDecay {
  double a_min = 0.0;
  double a_max = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;

  friend bool operator==(const LevelDecay&, const LevelDecay&) = default;
};

struct TriageConfig {
  int n_init = 4;
  int spawn_interval = 75;
  int max_patients = 8;
  int timer_max = 250;
  LevelDecay stable{0.02, 0.05, 3.0, 5.0};
  LevelDecay urgent{0.05, 0.10, 2.0, 3.5};
  LevelDecay critical{0.10, 0.20, 1.0, 2.5};
  double theta_serious_min = 0.40;
  double theta_serious_max = 0.70;
  double theta_critical_min = 0.10;
  double theta_critical_max = 0.30;
  double theta_margin = 0.05;
  int w_max = 3;

  const LevelDecay& decay_for(int level) const {
    return level == 1 ? stable : level == 2 ? urgent : critical;
  }

  friend bool operator==(const TriageConfig&, const TriageConfig&) = default;
};

struct HazardConfig {
  int wind_zone_count = 2;
  int lowsig_zone_count = 2;
  int zone_length = 6;
  int refresh_interval = 30;
  double wind_fail_prob = 0.3;
  double lowsig_fail_prob = 0.3;

  friend bool operator==(const HazardConfig&, const HazardConfig&) = default;
};

struct RewardConfig {
  double delta = 0.1;
  double beta = 0.05;
  double lambda = 0.5;
  double gamma_w = 0.5;
  double gamma_s = 0.5;
  double gamma_b = 0.3;
  double closeness = 0.5;
  int r_close = 4;
  double delta_max = 2.0;
  double r_goal = 100.0;
  double r_crash = 50.0;
  double r_bat = 50.0;
  double r_land = 50.0;
  double p_death = 100.0;
  double invalid_land_penalty = 1.0;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct LearnerConfig {
  int episodes = 12000;
  std::vector<int> hidden{256, 256, 128};
  int buffer_capacity = 50000;
  int batch_size = 128;
  double gamma = 0.99;
  double learning_rate = 1e-4;
  int target_sync = 10;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay_fraction = 0.95;
  double grad_clip = 1.0;
  int checkpoint_interval = 1000;

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

struct EvalConfig {
  int episodes = 200;
  int workers = 1;
  double reserve_factor = 1.5;
  // Landing-rule margin, in units of drain_base.
  double safety_margin_steps = 2.0;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct RunConfig {
  WorldConfig world;
  TriageConfig triage;
  HazardConfig hazards;
  RewardConfig reward;
  LearnerConfig learner;
  EvalConfig eval;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses the line-oriented `section.key = value` format. Blank lines and
// `#` comments are ignored; unspecified keys keep their defaults. Errors
// name the offending line.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

// Applies a single `section.key = value` assignment.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Current value of a key in config-file syntax.
std::string get_config_value(const RunConfig& cfg, const std::string& key);

// Cross-field checks; throws ConfigError.
void validate(const RunConfig& cfg);

// Full effective configuration in the same format parse_config reads.
std::string echo_config(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace ceda
