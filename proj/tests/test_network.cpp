#include <cmath>
#include <set>

#include "doctest.h"
#include "malltwin/dqn/network.hpp"
#include "malltwin/dqn/replay_buffer.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/random.hpp"

using namespace malltwin;
using namespace malltwin::dqn;

namespace {

Eigen::MatrixXd random_batch(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

// Central differences over every parameter, via flatten/assign.
std::vector<double> numeric_gradient(QNetwork net, const Eigen::MatrixXd& s, const std::vector<int>& a,
                                     const std::vector<double>& y, double h) {
  auto theta = net.flatten();
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    net.assign(theta);
    const double up = net.loss(s, a, y);
    theta[i] = keep - h;
    net.assign(theta);
    const double down = net.loss(s, a, y);
    theta[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::vector<double> flatten_gradients(const Gradients& grad) {
  std::vector<double> flat;
  for (const auto& l : grad) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

}  // namespace

TEST_CASE("zero network outputs zeros, forward is deterministic") {
  QNetwork zero({4, 8, 25});
  const std::vector<double> x{0.3, -1.0, 2.0, 0.5};
  CHECK(zero.forward(x).isZero(0.0));
  CHECK(zero.output_dim() == 25);

  Rng rng(1);
  const auto net = QNetwork::he_uniform({4, 8, 25}, rng);
  CHECK(net.forward(x) == net.forward(x));
  CHECK(net.all_finite());
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), MismatchError);
}

TEST_CASE("forward is Lipschitz-continuous") {
  Rng rng(2);
  const auto net = QNetwork::he_uniform({6, 16, 16, 25}, rng);
  std::vector<double> x(6);
  for (auto& v : x) v = rng.uniform();
  auto y = x;
  y[2] += 1e-7;
  // Bound: product of the layers' max absolute row sums.
  double lipschitz = 1.0;
  for (const auto& l : net.layers()) lipschitz *= l.weight.cwiseAbs().rowwise().sum().maxCoeff();
  const double diff = (net.forward(x) - net.forward(y)).cwiseAbs().maxCoeff();
  CHECK(diff <= 1e-7 * lipschitz * (1 + 1e-9));
}

TEST_CASE("forward_batch matches column-wise forward") {
  Rng rng(3);
  const auto net = QNetwork::he_uniform({5, 7, 25}, rng);
  const auto batch = random_batch(5, 9, rng);
  const auto q = net.forward_batch(batch);
  for (int c = 0; c < 9; ++c) {
    const std::vector<double> x(batch.col(c).data(), batch.col(c).data() + 5);
    CHECK((q.col(c) - net.forward(x)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("He initialization bounds") {
  Rng rng(4);
  const auto net = QNetwork::he_uniform({10, 32, 25}, rng);
  for (const auto& l : net.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.cols()));
    CHECK(l.weight.cwiseAbs().maxCoeff() <= limit);
    CHECK(l.bias.isZero(0.0));
  }
  Rng a(9), b(9);
  CHECK(QNetwork::he_uniform({3, 4, 25}, a).flatten() == QNetwork::he_uniform({3, 4, 25}, b).flatten());
}

TEST_CASE("analytic gradient matches central differences") {
  const std::vector<std::vector<int>> shapes{{6, 8, 25}, {3, 5, 25}, {4, 8, 8, 25}, {2, 25}, {6, 7, 25}, {5, 3, 4, 25}};
  Rng rng(17);
  for (const auto& dims : shapes) {
    auto net = QNetwork::he_uniform(dims, rng);
    for (auto& l : net.layers()) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * (2.0 * rng.uniform() - 1.0);
    }
    const int batch = 6;
    const auto s = random_batch(dims.front(), batch, rng);
    std::vector<int> a(batch);
    std::vector<double> y(batch);
    for (int i = 0; i < batch; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(25));
      y[static_cast<std::size_t>(i)] = 3.0 * rng.uniform() - 1.5;
    }
    Gradients grad;
    const double loss = net.loss_and_gradient(s, a, y, grad);
    CHECK(loss == doctest::Approx(net.loss(s, a, y)).epsilon(1e-14));
    const auto analytic = flatten_gradients(grad);
    const auto numeric = numeric_gradient(net, s, a, y, 1e-5);
    REQUIRE(analytic.size() == numeric.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      num += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      den += analytic[i] * analytic[i] + numeric[i] * numeric[i];
    }
    CHECK(std::sqrt(num) / std::max(std::sqrt(den), 1e-12) < 1e-4);
  }
}

TEST_CASE("soft update algebra") {
  Rng rng(5);
  const auto online = QNetwork::he_uniform({4, 6, 25}, rng);
  auto target = QNetwork::he_uniform({4, 6, 25}, rng);
  const auto before = target.flatten();
  const auto theta = online.flatten();
  target.soft_update_from(online, 5e-3);
  const auto after = target.flatten();
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(std::abs(after[i] - (5e-3 * theta[i] + (1.0 - 5e-3) * before[i])) <= 1e-12);
  }
  target.soft_update_from(online, 1.0);
  CHECK(target.flatten() == theta);
  CHECK_THROWS_AS(target.soft_update_from(QNetwork({4, 5, 25}), 0.5), MismatchError);
}

TEST_CASE("flatten and assign round-trip") {
  Rng rng(6);
  auto net = QNetwork::he_uniform({3, 4, 25}, rng);
  const auto flat = net.flatten();
  CHECK(flat.size() == net.parameter_count());
  CHECK(net.parameter_count() == static_cast<std::size_t>(3 * 4 + 4 + 4 * 25 + 25));
  QNetwork other({3, 4, 25});
  other.assign(flat);
  CHECK(other.flatten() == flat);
  CHECK_THROWS_AS(other.assign(std::vector<double>(3)), MismatchError);
}

TEST_CASE("Adam first step moves each parameter by about lr against the gradient sign") {
  Rng rng(7);
  auto net = QNetwork::he_uniform({3, 4, 25}, rng);
  const auto before = net.flatten();
  auto grad = net.zero_gradients();
  for (auto& l : grad) {
    l.weight.setConstant(0.5);
    l.bias.setConstant(-2.0);
  }
  Adam adam(net, 1e-3);
  adam.step(net, grad);
  const auto after = net.flatten();
  const auto g = flatten_gradients(grad);
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after[i] - before[i] == doctest::Approx(g[i] > 0 ? -1e-3 : 1e-3).epsilon(1e-6));
  }
  CHECK(adam.steps() == 1);
}

TEST_CASE("replay buffer is a FIFO ring") {
  ReplayBuffer buf(5);
  CHECK_THROWS(ReplayBuffer(0));
  for (int i = 0; i < 8; ++i) buf.push({{static_cast<double>(i)}, i % 25, static_cast<double>(i), {0.0}, false});
  CHECK(buf.size() == 5);
  CHECK(buf.capacity() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(buf.at(i).reward == static_cast<double>(i + 3));
  CHECK_THROWS(buf.at(5));
}

TEST_CASE("FIFO property for many capacities") {
  for (std::size_t cap = 1; cap <= 9; ++cap) {
    for (std::size_t k = 0; k <= 2 * cap + 1; ++k) {
      ReplayBuffer buf(cap);
      for (std::size_t i = 0; i < cap + k; ++i) buf.push({{}, 0, static_cast<double>(i), {}, false});
      REQUIRE(buf.size() == cap);
      for (std::size_t i = 0; i < cap; ++i) CHECK(buf.at(i).reward == static_cast<double>(k + i));
    }
  }
}

TEST_CASE("replay sampling is without replacement and roughly uniform") {
  ReplayBuffer buf(50);
  for (int i = 0; i < 50; ++i) buf.push({{}, 0, static_cast<double>(i), {}, false});
  Rng rng(11);
  std::vector<int> hits(50, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto idx = buf.sample_indices(10, rng);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 10);
    for (auto i : idx) {
      CHECK(i < 50);
      ++hits[i];
    }
  }
  // Expected 400 per index; 5 sigma is about 95.
  for (int h : hits) CHECK(std::abs(h - 400) < 100);
  CHECK(buf.sample_indices(50, rng).size() == 50);
  CHECK_THROWS(buf.sample_indices(51, rng));
}
