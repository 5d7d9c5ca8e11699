#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace malltwin::dqn {

// Hyper-parameters of the deep Q-learning trainer. Defaults are the published
// table values; the remaining fields are free parameters.
struct TrainConfig {
  int batch_size = 128;
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double eps_init = 0.9;
  double eps_final = 0.05;
  double eps_decay = 2000.0;
  double tau = 5e-3;
  int episodes = 600;
  int buffer_capacity = 10000;
  std::uint64_t rng_seed = 0;

  std::vector<int> hidden_layers{128, 128};
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Multiplier applied to rewards before they enter the TD target. nullopt means
  // "auto": derived from the zone's training data by the caller.
  std::optional<double> reward_scale;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

}  // namespace malltwin::dqn
