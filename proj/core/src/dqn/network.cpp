#include "malltwin/dqn/network.hpp"

#include <cmath>
#include <string>

#include "malltwin/errors.hpp"

namespace malltwin::dqn {

QNetwork::QNetwork(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) throw ConfigError("a Q-network needs at least input and output dimensions");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]), Eigen::VectorXd::Zero(dims_[l + 1])});
  }
}

QNetwork QNetwork::he_uniform(std::vector<int> layer_dims, Rng& rng) {
  QNetwork net(std::move(layer_dims));
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = limit * (2.0 * rng.uniform() - 1.0);
      }
    }
  }
  return net;
}

Eigen::VectorXd QNetwork::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim()) {
    throw MismatchError("network expects " + std::to_string(input_dim()) + " features, got " +
                        std::to_string(input.size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * a + layers_[l].bias;
    a = l + 1 < layers_.size() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim()) {
    throw MismatchError("network expects " + std::to_string(input_dim()) + " features, got " +
                        std::to_string(inputs.rows()));
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

double QNetwork::loss(const Eigen::MatrixXd& states, std::span<const int> actions, std::span<const double> targets) const {
  const Eigen::MatrixXd q = forward_batch(states);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double err = q(actions[static_cast<std::size_t>(i)], i) - targets[static_cast<std::size_t>(i)];
    sum += err * err;
  }
  return sum / static_cast<double>(q.cols());
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                                   std::span<const double> targets, Gradients& grad) const {
  if (states.rows() != input_dim()) {
    throw MismatchError("network expects " + std::to_string(input_dim()) + " features, got " +
                        std::to_string(states.rows()));
  }
  const Eigen::Index batch = states.cols();
  const std::size_t n_layers = layers_.size();

  // activations[l] is the input to layer l; pre[l] its pre-activation output.
  std::vector<Eigen::MatrixXd> activations(n_layers + 1);
  std::vector<Eigen::MatrixXd> pre(n_layers);
  activations[0] = states;
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre[l] = layers_[l].weight * activations[l];
    pre[l].colwise() += layers_[l].bias;
    activations[l + 1] = l + 1 < n_layers ? Eigen::MatrixXd(pre[l].cwiseMax(0.0)) : pre[l];
  }

  const Eigen::MatrixXd& q = activations[n_layers];
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), batch);
  double sum = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double err = q(a, i) - targets[static_cast<std::size_t>(i)];
    sum += err * err;
    delta(a, i) = 2.0 * err * inv_batch;
  }

  grad.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    grad[l].weight.noalias() = delta * activations[l].transpose();
    grad[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers_[l].weight.transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return sum * inv_batch;
}

void QNetwork::soft_update_from(const QNetwork& online, double tau) {
  if (online.dims_ != dims_) throw MismatchError("soft update between networks of different shapes");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = tau * online.layers_[l].weight + (1.0 - tau) * layers_[l].weight;
    layers_[l].bias = tau * online.layers_[l].bias + (1.0 - tau) * layers_[l].bias;
  }
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> QNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

void QNetwork::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw MismatchError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                        std::to_string(flat.size()));
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[k++];
  }
}

bool QNetwork::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Gradients QNetwork::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

Adam::Adam(const QNetwork& net, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(net.zero_gradients()),
      v_(net.zero_gradients()) {}

void Adam::step(QNetwork& net, const Gradients& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ / c1;
  const double root_c2 = std::sqrt(c2);
  auto& layers = net.layers();
  const auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    // lr * mhat / (sqrt(vhat) + eps) with the bias corrections folded in.
    param.array() -= step * m.array() / (v.array().sqrt() / root_c2 + epsilon_);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, m_[l].weight, v_[l].weight, grad[l].weight);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grad[l].bias);
  }
}

}  // namespace malltwin::dqn
