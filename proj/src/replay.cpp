#include "ceda/replay.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ceda {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim)
    : capacity_(capacity), obs_dim_(obs_dim) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

std::size_t ReplayBuffer::slot(std::size_t logical) const {
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return (oldest + logical) % capacity_;
}

void ReplayBuffer::push(const TransitionView& t) {
  for (auto s : {t.obs0, t.obs1, t.next0, t.next1}) {
    if (s.size() != obs_dim_) {
      throw std::invalid_argument("replay push: observation length " + std::to_string(s.size()) +
                                  " != " + std::to_string(obs_dim_));
    }
  }
  // Storage grows lazily up to capacity, then the ring overwrites.
  if (size_ < capacity_ && head_ == size_) {
    obs_.resize((size_ + 1) * 4 * obs_dim_);
    actions_.resize((size_ + 1) * 2);
    rewards_.resize((size_ + 1) * 2);
    terminal_.resize(size_ + 1);
  }
  double* dst = obs_.data() + head_ * 4 * obs_dim_;
  for (auto s : {t.obs0, t.obs1, t.next0, t.next1}) {
    std::copy(s.begin(), s.end(), dst);
    dst += obs_dim_;
  }
  actions_[2 * head_] = t.action0;
  actions_[2 * head_ + 1] = t.action1;
  rewards_[2 * head_] = t.reward0;
  rewards_[2 * head_ + 1] = t.reward1;
  terminal_[head_] = t.terminal;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++pushed_;
}

TransitionView ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  const std::size_t s = slot(i);
  const double* base = obs_.data() + s * 4 * obs_dim_;
  TransitionView t;
  t.obs0 = {base, obs_dim_};
  t.obs1 = {base + obs_dim_, obs_dim_};
  t.next0 = {base + 2 * obs_dim_, obs_dim_};
  t.next1 = {base + 3 * obs_dim_, obs_dim_};
  t.action0 = actions_[2 * s];
  t.action1 = actions_[2 * s + 1];
  t.reward0 = rewards_[2 * s];
  t.reward1 = rewards_[2 * s + 1];
  t.terminal = terminal_[s] != 0;
  return t;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.below(size_);
  return idx;
}

TrainingBatch batch_from(std::span<const TransitionView> transitions) {
  TrainingBatch b;
  if (transitions.empty()) return b;
  const auto d = static_cast<Eigen::Index>(transitions.front().obs0.size());
  const auto cols = static_cast<Eigen::Index>(2 * transitions.size());
  b.transitions = transitions.size();
  b.states.resize(2 * d, cols);
  b.next_states.resize(2 * d, cols);
  b.actions.resize(cols);
  b.rewards.resize(cols);
  b.terminal.resize(cols);
  auto put = [d](Eigen::MatrixXd& m, Eigen::Index col, std::span<const double> first,
                 std::span<const double> second) {
    m.col(col).head(d) = Eigen::Map<const Eigen::VectorXd>(first.data(), d);
    m.col(col).tail(d) = Eigen::Map<const Eigen::VectorXd>(second.data(), d);
  };
  for (std::size_t j = 0; j < transitions.size(); ++j) {
    const TransitionView& t = transitions[j];
    const auto c0 = static_cast<Eigen::Index>(2 * j);
    const auto c1 = c0 + 1;
    put(b.states, c0, t.obs0, t.obs1);
    put(b.states, c1, t.obs1, t.obs0);
    put(b.next_states, c0, t.next0, t.next1);
    put(b.next_states, c1, t.next1, t.next0);
    b.actions[c0] = t.action0;
    b.actions[c1] = t.action1;
    b.rewards[c0] = t.reward0;
    b.rewards[c1] = t.reward1;
    b.terminal[c0] = b.terminal[c1] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

TrainingBatch ReplayBuffer::make_batch(std::span<const std::size_t> indices) const {
  std::vector<TransitionView> views;
  views.reserve(indices.size());
  for (std::size_t i : indices) views.push_back(at(i));
  return batch_from(views);
}

TrainingBatch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  const auto idx = sample_indices(n, rng);
  return make_batch(idx);
}

}  // namespace ceda
