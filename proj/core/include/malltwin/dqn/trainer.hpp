#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "malltwin/dqn/network.hpp"
#include "malltwin/dqn/replay_buffer.hpp"
#include "malltwin/dqn/train_config.hpp"
#include "malltwin/environment.hpp"
#include "malltwin/random.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin::dqn {

// eps(x) = final + (init - final) * exp(-x / decay), x = environment steps so far.
struct EpsilonSchedule {
  double eps_init = 0.9;
  double eps_final = 0.05;
  double decay = 2000.0;

  static EpsilonSchedule from(const TrainConfig& cfg) { return {cfg.eps_init, cfg.eps_final, cfg.eps_decay}; }
  double operator()(std::uint64_t steps) const;
};

// Index of the largest value; ties go to the lowest index.
int argmax(const Eigen::VectorXd& q);

// Uniform random action with probability eps, greedy otherwise.
int select_action(const QNetwork& net, std::span<const double> state, double eps, Rng& rng);

// reward if done, else reward + gamma * max_a' Q_target(s', a').
std::vector<double> td_targets(const QNetwork& target_net, std::span<const Transition* const> batch, double gamma);

// One gradient step on the mean squared TD error of a sampled batch, followed
// by the soft target update. Returns the loss before the step.
double train_step(QNetwork& net, QNetwork& target_net, Adam& optimizer, const ReplayBuffer& buffer,
                  const TrainConfig& cfg, Rng& rng);

struct EpisodeLog {
  int episode = 0;
  std::string day_id;
  double total_score = 0.0;
  double comfort_score = 0.0;  // sum of raw comfort scores
  double energy_score = 0.0;   // w_e * sum of energy units
  double mean_loss = 0.0;      // 0 until the buffer holds a batch
  double epsilon = 0.0;        // at the end of the episode
};

struct TrainResult {
  QNetwork net;
  std::vector<EpisodeLog> log;
  double reward_scale = 1.0;
  std::uint64_t env_steps = 0;
};

using EnvFactory = std::function<ZoneEnvironment(const DaySchedule&)>;

// Largest possible |step reward| of an environment: 2 w_c per occupant plus the
// weighted energy at the coldest setpoint.
double max_abs_step_reward(const ZoneEnvironment& env, const ScenarioConfig& config);

// Episodes cycle through a seeded shuffle of `schedules`. Pure function of its inputs.
TrainResult train(const EnvFactory& make_env, std::span<const DaySchedule> schedules, const TrainConfig& cfg,
                  const ScenarioConfig& config);

std::string training_log_csv(std::span<const EpisodeLog> log);

}  // namespace malltwin::dqn
