#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/dqn/checkpoint.hpp"
#include "malltwin/dqn/trainer.hpp"
#include "malltwin/environment.hpp"
#include "malltwin/evaluation.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// balanced keeps both weights; energy sets w_c = 0; comfort sets w_e = 0.
enum class Mode { Balanced, Energy, Comfort };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);
RewardWeights mode_weights(const RewardWeights& reference, Mode mode);

struct ZoneModel {
  dqn::ModelCheckpoint checkpoint;
  std::vector<dqn::EpisodeLog> log;
};

struct TrainRequest {
  Topology topology = Topology::Centralized;
  Mode mode = Mode::Balanced;
  std::uint64_t seed = 0;
  std::optional<int> episodes;  // overrides config.rl.episodes
  int jobs = 1;
};

// One independent trainer per zone, seeded with seed XOR zone index. Zones may
// train concurrently (up to `jobs`); the result does not depend on `jobs`.
std::vector<ZoneModel> train_controllers(const ScenarioConfig& config, std::span<const DaySchedule> days,
                                         const TrainRequest& request);

// Throws MismatchError if the models do not cover exactly the topology's zones
// or do not fit its observation encoding.
Policy policy_from_models(std::span<const dqn::ModelCheckpoint> models, Topology topology, const ScenarioConfig& config);

}  // namespace malltwin
