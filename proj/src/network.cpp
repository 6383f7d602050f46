#include "ceda/network.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace ceda {

ParamSet ParamSet::zeros_like(const std::vector<DenseLayer>& shape) {
  ParamSet p;
  p.layers.reserve(shape.size());
  for (const DenseLayer& l : shape) {
    p.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return p;
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (const DenseLayer& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

double ParamSet::norm() const { return std::sqrt(squared_norm()); }

void ParamSet::scale(double s) {
  for (DenseLayer& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
}

double clip_global_norm(ParamSet& grads, double max_norm) {
  const double n = grads.norm();
  if (n > max_norm) grads.scale(max_norm / n);
  return n;
}

QNetwork::QNetwork(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("QNetwork needs at least two layer dims");
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("QNetwork layer dims must be positive");
  }
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(dims_[i + 1], dims_[i]),
                       Eigen::VectorXd::Zero(dims_[i + 1])});
  }
}

QNetwork QNetwork::initialized(std::vector<int> dims, Rng& rng) {
  QNetwork net(std::move(dims));
  for (DenseLayer& l : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = rng.uniform(-bound, bound);
    }
  }
  return net;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Eigen::VectorXd QNetwork::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_size()) {
    throw std::invalid_argument("QNetwork::forward: expected input of length " +
                                std::to_string(input_size()) + ", got " +
                                std::to_string(x.size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd z = layers_[i].weight * a + layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size()) {
    throw std::invalid_argument("QNetwork::forward_batch: input rows " + std::to_string(x.rows()) +
                                " != " + std::to_string(input_size()));
  }
  Eigen::MatrixXd a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * a;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x, Trace& trace) const {
  if (x.rows() != input_size()) {
    throw std::invalid_argument("QNetwork::forward_batch: input rows " + std::to_string(x.rows()) +
                                " != " + std::to_string(input_size()));
  }
  trace.activations.resize(layers_.size() + 1);
  trace.activations[0] = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * trace.activations[i];
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    trace.activations[i + 1] = std::move(z);
  }
  return trace.activations.back();
}

ParamSet QNetwork::backward(const Trace& trace, const Eigen::MatrixXd& d_output) const {
  ParamSet grads;
  grads.layers.resize(layers_.size());
  Eigen::MatrixXd dz = d_output;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Eigen::MatrixXd& input = trace.activations[i];
    grads.layers[i].weight = dz * input.transpose();
    grads.layers[i].bias = dz.rowwise().sum();
    if (i == 0) break;
    Eigen::MatrixXd da = layers_[i].weight.transpose() * dz;
    // ReLU derivative: the stored activation is positive exactly where z > 0.
    dz = (input.array() > 0.0).select(da, 0.0);
  }
  return grads;
}

AdamOptimizer::AdamOptimizer(const QNetwork& net, double learning_rate, double beta1,
                             double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(ParamSet::zeros_like(net.layers())),
      v_(ParamSet::zeros_like(net.layers())) {}

void AdamOptimizer::step(QNetwork& net, const ParamSet& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
      param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    update(layers[i].weight, m_.layers[i].weight, v_.layers[i].weight, grads.layers[i].weight);
    update(layers[i].bias, m_.layers[i].bias, v_.layers[i].bias, grads.layers[i].bias);
  }
}

void sync_target(const QNetwork& policy, QNetwork& target) { target = policy; }

namespace {

constexpr const char* kMagic = "CEDA-CKPT v1";

void put(std::ostream& out, double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, p - buf);
}

double take(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw CheckpointError("malformed value '" + tok + "' in checkpoint " + what);
  }
  return v;
}

}  // namespace

void write_checkpoint(const QNetwork& net, std::ostream& out) {
  out << kMagic << "\n";
  for (std::size_t i = 0; i < net.dims().size(); ++i) out << (i ? " " : "") << net.dims()[i];
  out << "\n";
  for (const DenseLayer& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        if (c) out << ' ';
        put(out, l.weight(r, c));
      }
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      if (r) out << ' ';
      put(out, l.bias(r));
    }
    out << '\n';
  }
}

QNetwork read_checkpoint(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw CheckpointError("empty checkpoint");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header.rfind("CEDA-CKPT", 0) != 0) throw CheckpointError("not a CEDA checkpoint: bad header");
  if (header != kMagic) throw CheckpointError("unsupported checkpoint version '" + header + "'");
  std::string dims_line;
  if (!std::getline(in, dims_line)) throw CheckpointError("checkpoint truncated before layer dims");
  std::istringstream ds(dims_line);
  std::vector<int> dims;
  for (int d; ds >> d;) {
    if (d <= 0) throw CheckpointError("checkpoint layer dims must be positive");
    dims.push_back(d);
  }
  if (!ds.eof() || dims.size() < 2) throw CheckpointError("malformed layer dims line in checkpoint");
  QNetwork net(dims);
  for (DenseLayer& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = take(in, "weights");
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = take(in, "biases");
  }
  std::string extra;
  if (in >> extra) throw CheckpointError("trailing data after checkpoint parameters");
  return net;
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint '" + tmp.string() + "'");
    write_checkpoint(net, out);
    out.flush();
    if (!out) throw CheckpointError("write failed for checkpoint '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into '" + path.string() + "': " + ec.message());
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  try {
    return read_checkpoint(in);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace ceda
