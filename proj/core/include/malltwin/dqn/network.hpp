#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "malltwin/random.hpp"

namespace malltwin::dqn {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Same shapes as the network's layers.
using Gradients = std::vector<DenseLayer>;

// Multilayer perceptron Q(s, .): ReLU on hidden layers, identity output.
class QNetwork {
public:
  QNetwork() = default;
  // All parameters zero.
  explicit QNetwork(std::vector<int> layer_dims);
  // Uniform He fan-in initialization: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b = 0.
  static QNetwork he_uniform(std::vector<int> layer_dims, Rng& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int output_dim() const { return dims_.empty() ? 0 : dims_.back(); }

  // Throws MismatchError when the input length differs from input_dim().
  Eigen::VectorXd forward(std::span<const double> input) const;
  // Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  // Mean over the batch of (Q(s_i, a_i) - y_i)^2; `states` holds one column per sample.
  double loss(const Eigen::MatrixXd& states, std::span<const int> actions, std::span<const double> targets) const;
  // Same loss, plus its gradient with respect to every parameter.
  double loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                           std::span<const double> targets, Gradients& grad) const;

  // target <- tau * online + (1 - tau) * target
  void soft_update_from(const QNetwork& online, double tau);

  std::size_t parameter_count() const;
  // Layer by layer: weight (row-major), then bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool all_finite() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Gradients zero_gradients() const;

private:
  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

// Adaptive-moment optimizer over a QNetwork's parameters.
class Adam {
public:
  Adam(const QNetwork& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(QNetwork& net, const Gradients& grad);
  long long steps() const { return t_; }

private:
  double lr_, beta1_, beta2_, epsilon_;
  long long t_ = 0;
  Gradients m_, v_;
};

}  // namespace malltwin::dqn
