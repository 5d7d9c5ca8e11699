#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/dqn/network.hpp"
#include "malltwin/dqn/train_config.hpp"

namespace malltwin::dqn {

inline constexpr int kCheckpointVersion = 1;

// A trained zone controller plus what is needed to use and audit it.
struct ModelCheckpoint {
  QNetwork net;
  TrainConfig train_config;
  std::string zone;
  std::string topology;
  std::string mode;
  RewardWeights weights;
  double reward_scale = 1.0;
  std::string state_layout;
  std::vector<std::string> training_day_ids;
};

// JSON: {format, version, layer_dims, parameters, train_config, seed, ...}.
std::string checkpoint_to_json(const ModelCheckpoint& checkpoint);
// Throws ParseError on malformed or wrong-version files.
ModelCheckpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace malltwin::dqn
