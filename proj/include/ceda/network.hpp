#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "ceda/rng.hpp"

namespace ceda {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.weight == b.weight && a.bias == b.bias;
  }
};

// Per-parameter tensors shaped like a network's layers. Used for gradients
// and optimizer moments.
struct ParamSet {
  std::vector<DenseLayer> layers;

  static ParamSet zeros_like(const std::vector<DenseLayer>& shape);
  double squared_norm() const;
  double norm() const;
  void scale(double s);
};

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_global_norm(ParamSet& grads, double max_norm);

// Fully connected Q-network: ReLU on hidden layers, identity on the output.
class QNetwork {
 public:
  QNetwork() = default;
  // All weights and biases zero.
  explicit QNetwork(std::vector<int> dims);

  // Fan-in scaled uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)],
  // zero biases.
  static QNetwork initialized(std::vector<int> dims, Rng& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_size() const { return dims_.front(); }
  int output_size() const { return dims_.back(); }
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Throws std::invalid_argument on a length mismatch.
  Eigen::VectorXd forward(std::span<const double> x) const;
  // Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

  // Activations of every layer, input first, kept for backward().
  struct Trace {
    std::vector<Eigen::MatrixXd> activations;
  };
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, Trace& trace) const;

  // Parameter gradients given dLoss/dOutput for the traced batch.
  ParamSet backward(const Trace& trace, const Eigen::MatrixXd& d_output) const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const QNetwork& net, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(QNetwork& net, const ParamSet& grads);

  long long step_count() const { return t_; }
  double learning_rate() const { return lr_; }
  const ParamSet& first_moment() const { return m_; }
  const ParamSet& second_moment() const { return v_; }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long long t_ = 0;
  ParamSet m_;
  ParamSet v_;
};

// Hard copy of every policy parameter into the target.
void sync_target(const QNetwork& policy, QNetwork& target);

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Text checkpoint: "CEDA-CKPT v1", the layer dims, then per layer the
// weights row-major followed by the biases, shortest round-trip decimals.
void save_checkpoint(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_checkpoint(const std::filesystem::path& path);

void write_checkpoint(const QNetwork& net, std::ostream& out);
QNetwork read_checkpoint(std::istream& in);

}  // namespace ceda
