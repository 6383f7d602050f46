#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ceda/config.hpp"
#include "ceda/network.hpp"
#include "ceda/record.hpp"
#include "ceda/replay.hpp"
#include "ceda/world.hpp"

namespace ceda {

// Epsilon-greedy over the network's action values; ties go to the lowest
// index. With epsilon == 0 the rng is not consumed.
int select_action(const QNetwork& net, std::span<const double> joint_state, double epsilon,
                  Rng& rng);
int greedy_action(const Eigen::VectorXd& q);

// Multiplicative decay from epsilon_start to epsilon_min over the first
// epsilon_decay_fraction of `episodes`, floored afterwards. Episode is 0-based.
double epsilon_at(int episode, int episodes, const LearnerConfig& cfg);

struct TdResult {
  double loss = 0.0;
  double grad_norm = 0.0;          // before clipping
  double clipped_grad_norm = 0.0;  // after clipping
};

// Mean over transitions of (delta_0)^2 + (delta_1)^2 with targets from the
// target network, plus the gradient w.r.t. the policy parameters.
double td_loss(const QNetwork& policy, const QNetwork& target, const TrainingBatch& batch,
               double gamma, ParamSet* grads = nullptr);

// One clipped Adam step on the TD loss.
TdResult td_update(QNetwork& policy, const QNetwork& target, const TrainingBatch& batch,
                   double gamma, AdamOptimizer& optimizer, double grad_clip = 1.0);

struct EpisodeLog {
  int episode = 0;
  int steps = 0;
  double reward0 = 0.0;
  double reward1 = 0.0;
  int delivered = 0;
  int expired = 0;
  bool landed0 = false;
  bool landed1 = false;
  int collisions = 0;
  double battery0 = 0.0;
  double battery1 = 0.0;
  std::array<int, 3> delivered_by_class{};
  std::array<int, 3> expired_by_class{};
  std::array<int, 3> spawned_by_class{};
  double epsilon = 0.0;
  double utilization = 0.0;
  double eta = 0.0;
  long long updates = 0;
  double mean_loss = 0.0;

  double reward_total() const { return reward0 + reward1; }
  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

struct TrainingLog {
  std::vector<EpisodeLog> rows;

  static std::string csv_header();
  static std::string csv_row(const EpisodeLog& row);
  void write_csv(std::ostream& out) const;
  friend bool operator==(const TrainingLog&, const TrainingLog&) = default;
};

EpisodeLog summarize_episode(int episode, const EpisodeRecord& rec, double epsilon,
                             long long updates, double mean_loss);

struct TrainOptions {
  // When set, the checkpoint and a streamed training_log.csv go here.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const EpisodeLog&)> on_episode;
};

struct TrainResult {
  QNetwork policy;
  TrainingLog log;
};

std::vector<int> network_dims(const RunConfig& cfg);

TrainResult train(const RunConfig& cfg, std::uint64_t seed, const TrainOptions& options = {});

}  // namespace ceda
