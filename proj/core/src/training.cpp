#include "malltwin/training.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "malltwin/errors.hpp"

namespace malltwin {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Balanced: return "balanced";
    case Mode::Energy: return "energy";
    case Mode::Comfort: return "comfort";
  }
  return "balanced";
}

Mode parse_mode(std::string_view text) {
  if (text == "balanced") return Mode::Balanced;
  if (text == "energy") return Mode::Energy;
  if (text == "comfort") return Mode::Comfort;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected balanced, energy or comfort)");
}

RewardWeights mode_weights(const RewardWeights& reference, Mode mode) {
  RewardWeights w = reference;
  if (mode == Mode::Energy) w.w_c = 0.0;
  if (mode == Mode::Comfort) w.w_e = 0.0;
  return w;
}

std::vector<ZoneModel> train_controllers(const ScenarioConfig& config, std::span<const DaySchedule> days,
                                         const TrainRequest& request) {
  if (days.empty()) throw ConfigError("training needs at least one day");
  const auto zones = make_zones(config.mall, request.topology);
  const auto weights = mode_weights(config.reward, request.mode);
  weights.validate();

  std::vector<std::string> day_ids;
  for (const auto& d : days) day_ids.push_back(d.day_id);

  std::vector<ZoneModel> models(zones.size());
  const auto train_zone = [&](std::size_t z) {
    dqn::TrainConfig cfg = config.rl;
    cfg.rng_seed = request.seed ^ static_cast<std::uint64_t>(z);
    if (request.episodes) cfg.episodes = *request.episodes;
    const Zone& zone = zones[z];
    const dqn::EnvFactory factory = [&](const DaySchedule& day) {
      const Zone one[] = {zone};
      auto traces = zone_traces(config, day, one);
      return ZoneEnvironment(config, zone, std::move(traces.front()), weights);
    };
    auto result = dqn::train(factory, days, cfg, config);
    ZoneModel& m = models[z];
    m.checkpoint.net = std::move(result.net);
    m.checkpoint.train_config = cfg;
    m.checkpoint.zone = zone.name;
    m.checkpoint.topology = to_string(request.topology);
    m.checkpoint.mode = to_string(request.mode);
    m.checkpoint.weights = weights;
    m.checkpoint.reward_scale = result.reward_scale;
    m.checkpoint.state_layout =
        config.observation.layout == StateLayout::GroupTotals ? "group_totals" : "group_by_store";
    m.checkpoint.training_day_ids = day_ids;
    m.log = std::move(result.log);
  };

  const int jobs = std::max(1, std::min<int>(request.jobs, static_cast<int>(zones.size())));
  if (jobs == 1) {
    for (std::size_t z = 0; z < zones.size(); ++z) train_zone(z);
    return models;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (int j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (std::size_t z = next++; z < zones.size(); z = next++) {
        try {
          train_zone(z);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
  return models;
}

Policy policy_from_models(std::span<const dqn::ModelCheckpoint> models, Topology topology, const ScenarioConfig& config) {
  const auto zones = make_zones(config.mall, topology);
  if (models.size() != zones.size()) {
    throw MismatchError(std::to_string(models.size()) + " model(s) given, " + to_string(topology) + " topology has " +
                        std::to_string(zones.size()) + " zone(s)");
  }
  std::vector<std::pair<std::string, Policy>> per_zone;
  for (const auto& zone : zones) {
    const auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.zone == zone.name; });
    if (it == models.end()) throw MismatchError("no model for zone '" + zone.name + "'");
    if (it->topology != to_string(topology)) {
      throw MismatchError("model for zone '" + zone.name + "' was trained for " + it->topology + " topology");
    }
    if (it->net.input_dim() != feature_dim(config, zone)) {
      throw MismatchError("model for zone '" + zone.name + "' expects " + std::to_string(it->net.input_dim()) +
                          " features, config encodes " + std::to_string(feature_dim(config, zone)));
    }
    per_zone.emplace_back(zone.name, Policy::dqn(it->net, zone.name));
  }
  return Policy::per_zone(std::move(per_zone));
}

}  // namespace malltwin
