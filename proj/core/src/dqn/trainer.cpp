#include "malltwin/dqn/trainer.hpp"

#include <cmath>
#include <numeric>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin::dqn {

double EpsilonSchedule::operator()(std::uint64_t steps) const {
  return eps_final + (eps_init - eps_final) * std::exp(-static_cast<double>(steps) / decay);
}

int argmax(const Eigen::VectorXd& q) {
  int best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = static_cast<int>(i);
  }
  return best;
}

int select_action(const QNetwork& net, std::span<const double> state, double eps, Rng& rng) {
  if (rng.uniform() < eps) return static_cast<int>(rng.below(static_cast<std::uint64_t>(net.output_dim())));
  return argmax(net.forward(state));
}

namespace {

Eigen::MatrixXd stack_states(std::span<const Transition* const> batch, bool next) {
  const auto dim = static_cast<Eigen::Index>(batch.front()->state.size());
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i]->next_state : batch[i]->state;
    m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
  }
  return m;
}

}  // namespace

std::vector<double> td_targets(const QNetwork& target_net, std::span<const Transition* const> batch, double gamma) {
  if (batch.empty()) throw ConfigError("td_targets needs a nonempty batch");
  const Eigen::MatrixXd q_next = target_net.forward_batch(stack_states(batch, true));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch[i]->reward;
    if (!batch[i]->done) y[i] += gamma * q_next.col(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return y;
}

double train_step(QNetwork& net, QNetwork& target_net, Adam& optimizer, const ReplayBuffer& buffer,
                  const TrainConfig& cfg, Rng& rng) {
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  if (buffer.size() < batch_size) {
    throw ConfigError("replay buffer holds " + std::to_string(buffer.size()) + " transitions, batch needs " +
                      std::to_string(batch_size));
  }
  std::vector<const Transition*> batch;
  batch.reserve(batch_size);
  for (const auto i : buffer.sample_indices(batch_size, rng)) batch.push_back(&buffer.at(i));

  const auto targets = td_targets(target_net, batch, cfg.gamma);
  std::vector<int> actions(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) actions[i] = batch[i]->action;

  Gradients grad;
  const double loss = net.loss_and_gradient(stack_states(batch, false), actions, targets, grad);
  optimizer.step(net, grad);
  target_net.soft_update_from(net, cfg.tau);
  return loss;
}

double max_abs_step_reward(const ZoneEnvironment& env, const ScenarioConfig& config) {
  const auto& w = env.weights();
  double outdoor = config.energy.ambient_temp_c;
  for (double t : config.energy.outdoor_temp_c_by_checkpoint) outdoor = std::max(outdoor, t);
  EnergyModelParams params = config.energy;
  params.ambient_temp_c = outdoor;
  const double coldest = energy_usage_kwh(params, env.zone(), config.mall.ceiling_height_m, kActionSpace.min_c);
  return w.w_c * 2.0 * env.peak_occupancy() + w.w_e * coldest * w.energy_units_per_kwh;
}

TrainResult train(const EnvFactory& make_env, std::span<const DaySchedule> schedules, const TrainConfig& cfg,
                  const ScenarioConfig& config) {
  cfg.validate();
  if (schedules.empty()) throw ConfigError("training needs at least one day schedule");

  TrainResult result;
  if (cfg.reward_scale) {
    result.reward_scale = *cfg.reward_scale;
  } else {
    double largest = 0.0;
    for (const auto& day : schedules) largest = std::max(largest, max_abs_step_reward(make_env(day), config));
    result.reward_scale = largest > 0.0 ? 1.0 / largest : 1.0;
  }

  const int input_dim = make_env(schedules.front()).feature_dim();
  std::vector<int> dims{input_dim};
  dims.insert(dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  dims.push_back(kActionSpace.size());

  Rng init_rng(derive_seed(cfg.rng_seed, 1));
  Rng explore_rng(derive_seed(cfg.rng_seed, 2));
  Rng sample_rng(derive_seed(cfg.rng_seed, 3));
  Rng order_rng(derive_seed(cfg.rng_seed, 4));

  result.net = QNetwork::he_uniform(dims, init_rng);
  QNetwork target = result.net;
  Adam optimizer(result.net, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  const auto epsilon = EpsilonSchedule::from(cfg);

  std::vector<std::size_t> order(schedules.size());
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const auto slot = static_cast<std::size_t>(episode) % schedules.size();
    if (slot == 0) {
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[order_rng.below(i)]);
    }
    const auto& day = schedules[order[slot]];
    ZoneEnvironment env = make_env(day);
    const auto& w = env.weights();

    EpisodeLog entry;
    entry.episode = episode;
    entry.day_id = day.day_id;
    double loss_sum = 0.0;
    int loss_count = 0;
    double energy_units = 0.0;

    std::vector<double> state = env.features();
    while (!env.done()) {
      const double eps = epsilon(result.env_steps);
      const int action = select_action(result.net, state, eps, explore_rng);
      const StepResult step = env.step(action);
      std::vector<double> next = env.features();
      buffer.push({state, action, step.reward.total * result.reward_scale, next, step.done});
      ++result.env_steps;

      entry.comfort_score += step.reward.comfort_score;
      energy_units += step.reward.energy_units;

      if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        loss_sum += train_step(result.net, target, optimizer, buffer, cfg, sample_rng);
        ++loss_count;
      }
      state = std::move(next);
    }
    entry.energy_score = w.w_e * energy_units;
    entry.total_score = w.w_c * entry.comfort_score - entry.energy_score;
    entry.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    entry.epsilon = epsilon(result.env_steps);
    result.log.push_back(std::move(entry));
  }
  return result;
}

std::string training_log_csv(std::span<const EpisodeLog> log) {
  std::string out = "episode,total_score,comfort_score,energy_score,mean_loss,epsilon\n";
  for (const auto& e : log) {
    out += std::to_string(e.episode) + "," + format_number(e.total_score) + "," + format_number(e.comfort_score) + "," +
           format_number(e.energy_score) + "," + format_number(e.mean_loss) + "," + format_number(e.epsilon) + "\n";
  }
  return out;
}

}  // namespace malltwin::dqn
