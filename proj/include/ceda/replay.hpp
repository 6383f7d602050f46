#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "ceda/rng.hpp"

namespace ceda {

// One joint step: both agents' observations, actions and rewards.
struct TransitionView {
  std::span<const double> obs0;
  std::span<const double> obs1;
  std::span<const double> next0;
  std::span<const double> next1;
  int action0 = 0;
  int action1 = 0;
  double reward0 = 0.0;
  double reward1 = 0.0;
  bool terminal = false;
};

// Mini-batch laid out for the shared network: column 2j + i holds agent i's
// joint query [o_i, o_{1-i}] for transition j.
struct TrainingBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd next_states;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> terminal;  // 1.0 or 0.0 per column
  std::size_t transitions = 0;
};

// Fixed-capacity FIFO ring of joint transitions.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim);

  void push(const TransitionView& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t obs_dim() const { return obs_dim_; }
  // Total transitions ever pushed.
  std::size_t pushed() const { return pushed_; }

  // i = 0 is the oldest stored transition.
  TransitionView at(std::size_t i) const;

  // Uniform draws with replacement, as logical indices.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  TrainingBatch make_batch(std::span<const std::size_t> indices) const;
  TrainingBatch sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t slot(std::size_t logical) const;

  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next slot to write
  std::size_t pushed_ = 0;
  std::vector<double> obs_;  // 4 * obs_dim per slot: o0, o1, o0', o1'
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> terminal_;
};

TrainingBatch batch_from(std::span<const TransitionView> transitions);

}  // namespace ceda
