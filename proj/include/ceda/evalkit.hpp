#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ceda/config.hpp"
#include "ceda/network.hpp"
#include "ceda/record.hpp"
#include "ceda/schedulers.hpp"
#include "ceda/sensing.hpp"

namespace ceda {

// Either a trained network (greedy, optional ablation mask) or one of the
// heuristic baselines.
struct Policy {
  std::shared_ptr<const QNetwork> network;
  AblationMask mask;
  std::optional<Baseline> baseline;
  LandingRule landing_rule;

  static Policy from_network(std::shared_ptr<const QNetwork> net, AblationMask mask = {});
  static Policy from_baseline(Baseline b, LandingRule rule = {});
  std::string name() const;
};

struct ScenarioOverride {
  enum class Op { Set, Scale };
  std::string key;
  Op op = Op::Set;
  std::string value;  // for Set
  double factor = 1.0;  // for Scale
};

struct Scenario {
  std::string name;
  std::vector<ScenarioOverride> overrides;

  // Base config with the overrides applied; n_init is clamped to M.
  RunConfig apply(const RunConfig& base) const;
};

// baseline, high-network-stress, fast-decay, sparse-patients,
// dense-patients, low-disruption.
const std::vector<Scenario>& standard_scenarios();
// Throws ConfigError for an unknown name.
const Scenario& find_scenario(const std::string& name);

// Seeds for evaluation episode i of a run seeded with `seed`.
std::uint64_t episode_seed(std::uint64_t seed, int episode);

// Throws ConfigError when the network's input size does not match cfg.
void check_compatible(const Policy& policy, const RunConfig& cfg);

EpisodeRecord run_episode(const Policy& policy, const RunConfig& cfg, std::uint64_t seed,
                          RecorderOptions opts = {});

// Runs episodes 0..n-1 on `workers` threads. The output order follows the
// episode index, so the worker count never changes results.
std::vector<EpisodeRecord> evaluate(const Policy& policy, const RunConfig& cfg,
                                    std::uint64_t seed, int n_episodes, int workers = 1,
                                    RecorderOptions opts = {});

struct MetricSummary {
  int episodes = 0;
  double eta = 0.0;
  double utilization = 0.0;
  double both_landed_rate = 0.0;
  double delivered = 0.0;
  double battery = 0.0;  // mean end battery over both agents
  double w3_expired = 0.0;
  double collisions = 0.0;
  double reward = 0.0;  // mean of reward0 + reward1
};

MetricSummary summarize(const std::vector<EpisodeRecord>& records);

struct PerClassStats {
  std::array<double, 3> mean_delivered{};
  std::array<double, 3> mean_expired{};
  std::array<double, 3> mean_spawned{};
  // Terminal-class deliveries over spawn-class counts; escalation can push
  // this above 1.
  std::array<double, 3> delivery_rate{};
  std::array<double, 3> unserved_rate{};
  std::optional<double> delivery_rate_jain;
};

PerClassStats per_class_stats(const std::vector<EpisodeRecord>& records);

struct StressCell {
  std::string load;
  double lowsig_fail_prob = 0.0;
  double eta = 0.0;
  double both_landed_rate = 0.0;
  double w3_expired = 0.0;
};

inline const std::array<double, 3> kStressFailProbs{0.0, 0.3, 0.6};
inline const std::array<const char*, 3> kStressLoads{"light", "baseline", "heavy"};

// Load rows x network-failure columns, row-major.
std::vector<StressCell> stress_grid(const Policy& policy, const RunConfig& base,
                                    int n_episodes, std::uint64_t seed, int workers = 1);
RunConfig stress_config(const RunConfig& base, int load_row, double lowsig_fail_prob);

struct AblationRow {
  std::string condition;
  AblationMask mask;
  double eta = 0.0;
  double both_landed_rate = 0.0;
  double delivered = 0.0;
  double battery = 0.0;
  double w3_expired = 0.0;
};

// full, no-network, no-wind-physical, no-battery, no-triage-weights,
// no-patient-timers.
std::vector<std::pair<std::string, AblationMask>> ablation_conditions();
std::vector<AblationRow> ablation_suite(std::shared_ptr<const QNetwork> net, const RunConfig& base,
                                        int n_episodes, std::uint64_t seed, int workers = 1);

// One row of episodes.csv.
struct EpisodeRow {
  std::uint64_t seed = 0;
  int steps = 0;
  double reward0 = 0.0;
  double reward1 = 0.0;
  int delivered = 0;
  int expired = 0;
  bool landed0 = false;
  bool landed1 = false;
  bool both_landed = false;
  double battery0 = 0.0;
  double battery1 = 0.0;
  int collisions = 0;
  std::optional<double> utilization;
  std::optional<double> eta;
  std::array<int, 3> delivered_by_class{};
  std::array<int, 3> expired_by_class{};

  static EpisodeRow from_record(const EpisodeRecord& rec);
  friend bool operator==(const EpisodeRow&, const EpisodeRow&) = default;
};

std::string episodes_csv_header();
void write_episodes_csv(const std::vector<EpisodeRow>& rows, std::ostream& out);
std::vector<EpisodeRow> read_episodes_csv(std::istream& in);
void export_csv(const std::vector<EpisodeRecord>& records, const std::filesystem::path& path);
void export_csv(const std::vector<StressCell>& grid, const std::filesystem::path& path);
void export_csv(const std::vector<AblationRow>& table, const std::filesystem::path& path);
void write_stress_csv(const std::vector<StressCell>& grid, std::ostream& out);
void write_ablation_csv(const std::vector<AblationRow>& table, std::ostream& out);

// Trajectory overlay; needs a record captured with keep_trace.
std::string trajectory_svg(const EpisodeRecord& rec);
void export_trajectory_svg(const EpisodeRecord& rec, const std::filesystem::path& path);

}  // namespace ceda
