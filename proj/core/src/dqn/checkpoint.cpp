#include "malltwin/dqn/checkpoint.hpp"

#include <json.hpp>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin::dqn {

using nlohmann::json;

std::string checkpoint_to_json(const ModelCheckpoint& c) {
  const auto& t = c.train_config;
  json train = {
      {"batch_size", t.batch_size},   {"learning_rate", t.learning_rate},
      {"gamma", t.gamma},             {"eps_init", t.eps_init},
      {"eps_final", t.eps_final},     {"eps_decay", t.eps_decay},
      {"tau", t.tau},                 {"episodes", t.episodes},
      {"buffer_capacity", t.buffer_capacity},
      {"hidden_layers", t.hidden_layers},
      {"adam_beta1", t.adam_beta1},   {"adam_beta2", t.adam_beta2},
      {"adam_epsilon", t.adam_epsilon},
  };
  const json root = {
      {"format", "malltwin-qnetwork"},
      {"version", kCheckpointVersion},
      {"layer_dims", c.net.dims()},
      {"parameters", c.net.flatten()},
      {"train_config", train},
      {"seed", t.rng_seed},
      {"zone", c.zone},
      {"topology", c.topology},
      {"mode", c.mode},
      {"reward_weights", {{"w_c", c.weights.w_c}, {"w_e", c.weights.w_e}, {"energy_units_per_kwh", c.weights.energy_units_per_kwh}}},
      {"reward_scale", c.reward_scale},
      {"state_layout", c.state_layout},
      {"training_day_ids", c.training_day_ids},
  };
  return root.dump() + "\n";
}

ModelCheckpoint checkpoint_from_json(std::string_view text) {
  try {
    const json root = json::parse(text);
    if (root.at("format").get<std::string>() != "malltwin-qnetwork") throw ParseError("not a malltwin model file");
    if (root.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("unsupported model file version " + std::to_string(root.at("version").get<int>()));
    }
    ModelCheckpoint c;
    c.net = QNetwork(root.at("layer_dims").get<std::vector<int>>());
    c.net.assign(root.at("parameters").get<std::vector<double>>());
    const auto& t = root.at("train_config");
    auto& cfg = c.train_config;
    cfg.batch_size = t.at("batch_size").get<int>();
    cfg.learning_rate = t.at("learning_rate").get<double>();
    cfg.gamma = t.at("gamma").get<double>();
    cfg.eps_init = t.at("eps_init").get<double>();
    cfg.eps_final = t.at("eps_final").get<double>();
    cfg.eps_decay = t.at("eps_decay").get<double>();
    cfg.tau = t.at("tau").get<double>();
    cfg.episodes = t.at("episodes").get<int>();
    cfg.buffer_capacity = t.at("buffer_capacity").get<int>();
    cfg.hidden_layers = t.at("hidden_layers").get<std::vector<int>>();
    cfg.adam_beta1 = t.at("adam_beta1").get<double>();
    cfg.adam_beta2 = t.at("adam_beta2").get<double>();
    cfg.adam_epsilon = t.at("adam_epsilon").get<double>();
    cfg.rng_seed = root.at("seed").get<std::uint64_t>();
    c.zone = root.at("zone").get<std::string>();
    c.topology = root.at("topology").get<std::string>();
    c.mode = root.at("mode").get<std::string>();
    const auto& w = root.at("reward_weights");
    c.weights.w_c = w.at("w_c").get<double>();
    c.weights.w_e = w.at("w_e").get<double>();
    c.weights.energy_units_per_kwh = w.at("energy_units_per_kwh").get<double>();
    c.reward_scale = root.at("reward_scale").get<double>();
    c.state_layout = root.at("state_layout").get<std::string>();
    c.training_day_ids = root.at("training_day_ids").get<std::vector<std::string>>();
    if (!c.net.all_finite()) throw ParseError("model file holds non-finite parameters");
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  } catch (const MismatchError& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path) {
  write_text_file_atomic(path, checkpoint_to_json(checkpoint));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_text_file(path));
}

}  // namespace malltwin::dqn
