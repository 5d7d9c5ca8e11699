#include "malltwin/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

using nlohmann::json;

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json* member(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + join_path(path, key) + "'");
  }
  if (!v->is_number()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be a number");
  }
  const double value = v->get<double>();
  if (!std::isfinite(value)) {
    throw ConfigError("field '" + join_path(path, key) + "' must be finite");
  }
  return value;
}

long long get_integer(const json& obj, const std::string& key, const std::string& path,
                      std::optional<long long> fallback = std::nullopt) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + join_path(path, key) + "'");
  }
  if (!v->is_number_integer()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be an integer");
  }
  return v->get<long long>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + join_path(path, key) + "'");
  }
  if (!v->is_string()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be a string");
  }
  return v->get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be a boolean");
  }
  return v->get<bool>();
}

TimeOfDay get_time(const json& obj, const std::string& key, const std::string& path, TimeOfDay fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be an \"HH:MM\" string");
  }
  try {
    return TimeOfDay::parse(v->get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError("field '" + join_path(path, key) + "': " + e.what());
  }
}

const json& require_object(const json& obj, const std::string& key, const std::string& path) {
  const json* v = member(obj, key);
  if (v == nullptr || !v->is_object()) {
    throw ConfigError("field '" + join_path(path, key) + "' must be an object");
  }
  return *v;
}

MallConfig parse_mall(const json& j) {
  const std::string path = "mall";
  MallConfig mall;
  mall.name = get_string(j, "name", path, mall.name);
  mall.total_area_m2 = get_number(j, "total_area_m2", path, mall.total_area_m2);
  mall.ceiling_height_m = get_number(j, "ceiling_height_m", path, mall.ceiling_height_m);
  mall.open_time = get_time(j, "open_time", path, mall.open_time);
  mall.close_time = get_time(j, "close_time", path, mall.close_time);
  mall.checkpoint_minutes = static_cast<int>(get_integer(j, "checkpoint_minutes", path, mall.checkpoint_minutes));
  mall.town_population = static_cast<int>(get_integer(j, "town_population", path, mall.town_population));

  const json* stores = member(j, "stores");
  if (stores == nullptr || !stores->is_array()) {
    throw ConfigError("field 'mall.stores' must be an array");
  }
  for (std::size_t i = 0; i < stores->size(); ++i) {
    const auto& s = (*stores)[i];
    const std::string sp = "mall.stores[" + std::to_string(i) + "]";
    if (!s.is_object()) throw ConfigError("field '" + sp + "' must be an object");
    Store store;
    store.name = get_string(s, "name", sp);
    store.area_m2 = get_number(s, "area_m2", sp);
    store.description = get_string(s, "description", sp);
    store.category = get_string(s, "category", sp, "");
    mall.stores.push_back(std::move(store));
  }
  return mall;
}

std::vector<PopulationGroup> parse_groups(const json& j) {
  if (!j.is_array()) throw ConfigError("field 'groups' must be an array");
  std::vector<PopulationGroup> groups;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& g = j[i];
    const std::string gp = "groups[" + std::to_string(i) + "]";
    if (!g.is_object()) throw ConfigError("field '" + gp + "' must be an object");
    PopulationGroup group;
    group.name = get_string(g, "name", gp);
    group.description = get_string(g, "description", gp);
    group.thermal_preference = get_string(g, "thermal_preference", gp);
    group.comfort_low_c = get_number(g, "comfort_low_c", gp);
    group.comfort_high_c = get_number(g, "comfort_high_c", gp);
    groups.push_back(std::move(group));
  }
  return groups;
}

EnergyModelParams parse_energy(const json& j) {
  const std::string path = "energy";
  EnergyModelParams e;
  e.air_density_kg_per_m3 = get_number(j, "air_density_kg_per_m3", path, e.air_density_kg_per_m3);
  e.heat_capacity_j_per_kg_k = get_number(j, "heat_capacity_j_per_kg_k", path, e.heat_capacity_j_per_kg_k);
  e.eer = get_number(j, "eer", path, e.eer);
  e.ambient_temp_c = get_number(j, "ambient_temp_c", path, e.ambient_temp_c);
  if (const json* trace = member(j, "outdoor_temp_c_by_checkpoint")) {
    if (!trace->is_array()) throw ConfigError("field 'energy.outdoor_temp_c_by_checkpoint' must be an array");
    for (const auto& v : *trace) {
      if (!v.is_number()) throw ConfigError("field 'energy.outdoor_temp_c_by_checkpoint' must hold numbers");
      e.outdoor_temp_c_by_checkpoint.push_back(v.get<double>());
    }
  }
  return e;
}

RewardWeights parse_reward(const json& j) {
  const std::string path = "reward";
  RewardWeights w;
  w.w_c = get_number(j, "w_c", path, w.w_c);
  w.w_e = get_number(j, "w_e", path, w.w_e);
  w.energy_units_per_kwh = get_number(j, "energy_units_per_kwh", path, w.energy_units_per_kwh);
  return w;
}

void parse_rl(const json& j, dqn::TrainConfig& rl, ObservationSettings& obs) {
  const std::string path = "rl";
  rl.batch_size = static_cast<int>(get_integer(j, "batch_size", path, rl.batch_size));
  rl.learning_rate = get_number(j, "learning_rate", path, rl.learning_rate);
  rl.gamma = get_number(j, "gamma", path, rl.gamma);
  rl.eps_init = get_number(j, "eps_init", path, rl.eps_init);
  rl.eps_final = get_number(j, "eps_final", path, rl.eps_final);
  rl.eps_decay = get_number(j, "eps_decay", path, rl.eps_decay);
  rl.tau = get_number(j, "tau", path, rl.tau);
  rl.episodes = static_cast<int>(get_integer(j, "episodes", path, rl.episodes));
  rl.buffer_capacity = static_cast<int>(get_integer(j, "buffer_capacity", path, rl.buffer_capacity));
  rl.rng_seed = static_cast<std::uint64_t>(get_integer(j, "rng_seed", path, static_cast<long long>(rl.rng_seed)));
  rl.adam_beta1 = get_number(j, "adam_beta1", path, rl.adam_beta1);
  rl.adam_beta2 = get_number(j, "adam_beta2", path, rl.adam_beta2);
  rl.adam_epsilon = get_number(j, "adam_epsilon", path, rl.adam_epsilon);
  if (const json* hidden = member(j, "hidden_layers")) {
    if (!hidden->is_array()) throw ConfigError("field 'rl.hidden_layers' must be an array of integers");
    rl.hidden_layers.clear();
    for (const auto& h : *hidden) {
      if (!h.is_number_integer()) throw ConfigError("field 'rl.hidden_layers' must be an array of integers");
      rl.hidden_layers.push_back(h.get<int>());
    }
  }
  if (const json* scale = member(j, "reward_scale")) {
    if (scale->is_string() && scale->get<std::string>() == "auto") {
      rl.reward_scale.reset();
    } else if (scale->is_number()) {
      rl.reward_scale = scale->get<double>();
    } else {
      throw ConfigError("field 'rl.reward_scale' must be a number or \"auto\"");
    }
  }
  obs.occupancy_scale = get_number(j, "occupancy_scale", path, obs.occupancy_scale);
  const auto layout = get_string(j, "state_layout", path, "group_totals");
  if (layout == "group_totals") {
    obs.layout = StateLayout::GroupTotals;
  } else if (layout == "group_by_store") {
    obs.layout = StateLayout::GroupByStore;
  } else {
    throw ConfigError("field 'rl.state_layout' must be \"group_totals\" or \"group_by_store\"");
  }
}

SyntheticProfile parse_synthetic(const json& j) {
  const std::string path = "synthetic";
  SyntheticProfile p;
  p.target_daily_visits = get_number(j, "target_daily_visits", path, p.target_daily_visits);
  p.daily_volume_jitter = get_number(j, "daily_volume_jitter", path, p.daily_volume_jitter);
  p.distribution_noise = get_number(j, "distribution_noise", path, p.distribution_noise);
  if (const json* ts = member(j, "temperature_sensitivity")) {
    const std::string tp = "synthetic.temperature_sensitivity";
    p.temperature_sensitivity = get_bool(*ts, "enabled", tp, false);
    p.sensitivity_band_low_c = get_number(*ts, "band_low_c", tp, p.sensitivity_band_low_c);
    p.sensitivity_band_high_c = get_number(*ts, "band_high_c", tp, p.sensitivity_band_high_c);
    p.sensitivity_per_degree = get_number(*ts, "per_degree", tp, p.sensitivity_per_degree);
  }
  if (const json* groups = member(j, "groups")) {
    if (!groups->is_object()) throw ConfigError("field 'synthetic.groups' must be an object");
    for (const auto& [name, g] : groups->items()) {
      const std::string gp = "synthetic.groups." + name;
      GroupProfile profile;
      const json* peaks = member(g, "peaks");
      if (peaks == nullptr || !peaks->is_array()) throw ConfigError("field '" + gp + ".peaks' must be an array");
      for (std::size_t i = 0; i < peaks->size(); ++i) {
        const std::string pp = gp + ".peaks[" + std::to_string(i) + "]";
        GaussianPeak peak;
        peak.mean = get_time((*peaks)[i], "mean", pp, peak.mean);
        peak.width_minutes = get_number((*peaks)[i], "width_minutes", pp, peak.width_minutes);
        peak.amplitude = get_number((*peaks)[i], "amplitude", pp, peak.amplitude);
        profile.peaks.push_back(peak);
      }
      if (const json* aff = member(g, "store_affinity")) {
        if (!aff->is_object()) throw ConfigError("field '" + gp + ".store_affinity' must be an object");
        for (const auto& [store, w] : aff->items()) {
          if (!w.is_number()) throw ConfigError("field '" + gp + ".store_affinity." + store + "' must be a number");
          profile.store_affinity[store] = w.get<double>();
        }
      }
      p.groups[name] = std::move(profile);
    }
  }
  return p;
}

LlmClientConfig parse_llm(const json& j) {
  const std::string path = "llm";
  LlmClientConfig c;
  c.endpoint_url = get_string(j, "endpoint_url", path, c.endpoint_url);
  c.model_name = get_string(j, "model_name", path, c.model_name);
  c.api_key_env_var = get_string(j, "api_key_env_var", path, c.api_key_env_var);
  c.sampling_temperature = get_number(j, "sampling_temperature", path, c.sampling_temperature);
  c.cache_dir = get_string(j, "cache_dir", path, c.cache_dir.string());
  c.timeout_s = get_number(j, "timeout_s", path, c.timeout_s);
  c.max_retries = static_cast<int>(get_integer(j, "max_retries", path, c.max_retries));
  return c;
}

}  // namespace

const Store* MallConfig::find_store(std::string_view store_name) const {
  const auto it = std::find_if(stores.begin(), stores.end(), [&](const Store& s) { return s.name == store_name; });
  return it == stores.end() ? nullptr : &*it;
}

void MallConfig::validate() const {
  if (stores.empty()) throw ConfigError("mall.stores must be nonempty");
  std::set<std::string> names;
  double area_sum = 0.0;
  for (const auto& s : stores) {
    if (s.name.empty()) throw ConfigError("mall.stores: store name must be nonempty");
    if (!names.insert(s.name).second) throw ConfigError("mall.stores: duplicate store name '" + s.name + "'");
    if (!(s.area_m2 > 0.0)) throw ConfigError("mall.stores['" + s.name + "'].area_m2 must be > 0");
    if (s.description.empty()) throw ConfigError("mall.stores['" + s.name + "'].description must be nonempty");
    area_sum += s.area_m2;
  }
  if (!(total_area_m2 > 0.0)) throw ConfigError("mall.total_area_m2 must be > 0");
  if (!(ceiling_height_m > 0.0)) throw ConfigError("mall.ceiling_height_m must be > 0");
  if (area_sum > total_area_m2 * (1.0 + 1e-12)) {
    throw ConfigError("mall.stores: sum of store areas (" + format_number(area_sum) +
                      ") exceeds mall.total_area_m2 (" + format_number(total_area_m2) + ")");
  }
  if (checkpoint_minutes <= 0) throw ConfigError("mall.checkpoint_minutes must be > 0");
  if (!(open_time < close_time)) throw ConfigError("mall.open_time must be before mall.close_time");
  if ((close_time - open_time) % checkpoint_minutes != 0) {
    throw ConfigError("mall.checkpoint_minutes must divide the opening interval (close_time - open_time)");
  }
  if (town_population <= 0) throw ConfigError("mall.town_population must be > 0");
}

void PopulationGroup::validate() const {
  if (name.empty()) throw ConfigError("groups: group name must be nonempty");
  if (description.empty()) throw ConfigError("groups['" + name + "'].description must be nonempty");
  if (!(comfort_low_c < comfort_high_c)) {
    throw ConfigError("groups['" + name + "'] comfort range invalid: comfort_low_c (" + format_number(comfort_low_c) +
                      ") must be below comfort_high_c (" + format_number(comfort_high_c) + ")");
  }
  if (comfort_low_c < 10.0 || comfort_high_c > 35.0) {
    throw ConfigError("groups['" + name + "'] comfort range must lie within [10, 35] degC");
  }
}

void RewardWeights::validate() const {
  if (w_c < 0.0) throw ConfigError("reward.w_c must be >= 0");
  if (w_e < 0.0) throw ConfigError("reward.w_e must be >= 0");
  if (w_c == 0.0 && w_e == 0.0) throw ConfigError("reward.w_c and reward.w_e must not both be zero");
  if (!(energy_units_per_kwh > 0.0)) throw ConfigError("reward.energy_units_per_kwh must be > 0");
}

void EnergyModelParams::validate() const {
  if (!(air_density_kg_per_m3 > 0.0)) throw ConfigError("energy.air_density_kg_per_m3 must be > 0");
  if (!(heat_capacity_j_per_kg_k > 0.0)) throw ConfigError("energy.heat_capacity_j_per_kg_k must be > 0");
  if (!(eer > 0.0)) throw ConfigError("energy.eer must be > 0");
  for (double t : outdoor_temp_c_by_checkpoint) {
    if (!std::isfinite(t)) throw ConfigError("energy.outdoor_temp_c_by_checkpoint must be finite");
  }
}

namespace dqn {

void TrainConfig::validate() const {
  if (batch_size <= 0) throw ConfigError("rl.batch_size must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("rl.learning_rate must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("rl.gamma must lie in (0, 1)");
  if (!(0.0 <= eps_final && eps_final <= eps_init && eps_init <= 1.0)) {
    throw ConfigError("rl.eps_init/rl.eps_final must satisfy 0 <= eps_final <= eps_init <= 1");
  }
  if (!(eps_decay > 0.0)) throw ConfigError("rl.eps_decay must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("rl.tau must lie in (0, 1]");
  if (episodes < 0) throw ConfigError("rl.episodes must be >= 0");
  if (buffer_capacity <= 0) throw ConfigError("rl.buffer_capacity must be > 0");
  for (int h : hidden_layers) {
    if (h <= 0) throw ConfigError("rl.hidden_layers entries must be > 0");
  }
  if (reward_scale && !(*reward_scale > 0.0)) throw ConfigError("rl.reward_scale must be > 0");
}

}  // namespace dqn

const PopulationGroup* ScenarioConfig::find_group(std::string_view group_name) const {
  const auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.name == group_name; });
  return it == groups.end() ? nullptr : &*it;
}

std::vector<std::string> ScenarioConfig::group_names() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.name);
  return out;
}

std::vector<std::string> ScenarioConfig::store_names() const {
  std::vector<std::string> out;
  for (const auto& s : mall.stores) out.push_back(s.name);
  return out;
}

void ScenarioConfig::validate() const {
  mall.validate();
  if (groups.empty()) throw ConfigError("groups must be nonempty");
  std::set<std::string> names;
  for (const auto& g : groups) {
    g.validate();
    if (!names.insert(g.name).second) throw ConfigError("groups: duplicate group name '" + g.name + "'");
  }
  energy.validate();
  const auto n_checkpoints = checkpoints(mall).size();
  const auto n_outdoor = energy.outdoor_temp_c_by_checkpoint.size();
  if (n_outdoor != 0 && n_outdoor != n_checkpoints && n_outdoor != n_checkpoints + 1) {
    throw ConfigError("energy.outdoor_temp_c_by_checkpoint must have one value per checkpoint (" +
                      std::to_string(n_checkpoints) + "), optionally plus one for closing");
  }
  reward.validate();
  rl.validate();
  if (!(observation.occupancy_scale > 0.0)) throw ConfigError("rl.occupancy_scale must be > 0");

  for (const auto& [name, profile] : synthetic.groups) {
    if (find_group(name) == nullptr) throw ConfigError("synthetic.groups: unknown group '" + name + "'");
    for (const auto& peak : profile.peaks) {
      if (!(peak.width_minutes > 0.0)) throw ConfigError("synthetic.groups." + name + ": peak width_minutes must be > 0");
      if (peak.amplitude < 0.0) throw ConfigError("synthetic.groups." + name + ": peak amplitude must be >= 0");
    }
    for (const auto& [store, w] : profile.store_affinity) {
      if (mall.find_store(store) == nullptr) {
        throw ConfigError("synthetic.groups." + name + ".store_affinity: unknown store '" + store + "'");
      }
      if (w < 0.0) throw ConfigError("synthetic.groups." + name + ".store_affinity." + store + " must be >= 0");
    }
  }
  if (!(synthetic.target_daily_visits > 0.0)) throw ConfigError("synthetic.target_daily_visits must be > 0");
  if (synthetic.daily_volume_jitter < 0.0 || synthetic.daily_volume_jitter >= 1.0) {
    throw ConfigError("synthetic.daily_volume_jitter must lie in [0, 1)");
  }
  if (synthetic.distribution_noise < 0.0) throw ConfigError("synthetic.distribution_noise must be >= 0");
  if (!(synthetic.sensitivity_band_low_c < synthetic.sensitivity_band_high_c)) {
    throw ConfigError("synthetic.temperature_sensitivity: band_low_c must be below band_high_c");
  }
  if (llm.timeout_s <= 0.0) throw ConfigError("llm.timeout_s must be > 0");
  if (llm.max_retries < 0) throw ConfigError("llm.max_retries must be >= 0");
}

ScenarioConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  const auto version = get_integer(root, "schema_version", "", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version));
  }

  ScenarioConfig config;
  config.mall = parse_mall(require_object(root, "mall", ""));
  const json* groups = member(root, "groups");
  if (groups == nullptr) throw ConfigError("missing required field 'groups'");
  config.groups = parse_groups(*groups);
  if (const json* e = member(root, "energy")) config.energy = parse_energy(*e);
  if (const json* r = member(root, "reward")) config.reward = parse_reward(*r);
  if (const json* rl = member(root, "rl")) parse_rl(*rl, config.rl, config.observation);
  if (const json* s = member(root, "synthetic")) config.synthetic = parse_synthetic(*s);
  if (const json* l = member(root, "llm")) config.llm = parse_llm(*l);

  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string config_to_json(const ScenarioConfig& c) {
  json root;
  root["schema_version"] = kConfigSchemaVersion;

  json stores = json::array();
  for (const auto& s : c.mall.stores) {
    stores.push_back({{"name", s.name}, {"area_m2", s.area_m2}, {"description", s.description}, {"category", s.category}});
  }
  root["mall"] = {
      {"name", c.mall.name},
      {"total_area_m2", c.mall.total_area_m2},
      {"ceiling_height_m", c.mall.ceiling_height_m},
      {"open_time", c.mall.open_time.str()},
      {"close_time", c.mall.close_time.str()},
      {"checkpoint_minutes", c.mall.checkpoint_minutes},
      {"town_population", c.mall.town_population},
      {"stores", stores},
  };

  json groups = json::array();
  for (const auto& g : c.groups) {
    groups.push_back({{"name", g.name},
                      {"description", g.description},
                      {"thermal_preference", g.thermal_preference},
                      {"comfort_low_c", g.comfort_low_c},
                      {"comfort_high_c", g.comfort_high_c}});
  }
  root["groups"] = groups;

  root["energy"] = {
      {"air_density_kg_per_m3", c.energy.air_density_kg_per_m3},
      {"heat_capacity_j_per_kg_k", c.energy.heat_capacity_j_per_kg_k},
      {"eer", c.energy.eer},
      {"ambient_temp_c", c.energy.ambient_temp_c},
  };
  if (!c.energy.outdoor_temp_c_by_checkpoint.empty()) {
    root["energy"]["outdoor_temp_c_by_checkpoint"] = c.energy.outdoor_temp_c_by_checkpoint;
  }
  root["reward"] = {{"w_c", c.reward.w_c}, {"w_e", c.reward.w_e}, {"energy_units_per_kwh", c.reward.energy_units_per_kwh}};

  const auto& rl = c.rl;
  root["rl"] = {
      {"batch_size", rl.batch_size},
      {"learning_rate", rl.learning_rate},
      {"gamma", rl.gamma},
      {"eps_init", rl.eps_init},
      {"eps_final", rl.eps_final},
      {"eps_decay", rl.eps_decay},
      {"tau", rl.tau},
      {"episodes", rl.episodes},
      {"buffer_capacity", rl.buffer_capacity},
      {"rng_seed", rl.rng_seed},
      {"hidden_layers", rl.hidden_layers},
      {"adam_beta1", rl.adam_beta1},
      {"adam_beta2", rl.adam_beta2},
      {"adam_epsilon", rl.adam_epsilon},
      {"occupancy_scale", c.observation.occupancy_scale},
      {"state_layout", c.observation.layout == StateLayout::GroupTotals ? "group_totals" : "group_by_store"},
  };
  if (rl.reward_scale) {
    root["rl"]["reward_scale"] = *rl.reward_scale;
  } else {
    root["rl"]["reward_scale"] = "auto";
  }

  const auto& sp = c.synthetic;
  json syn_groups = json::object();
  for (const auto& [name, profile] : sp.groups) {
    json peaks = json::array();
    for (const auto& p : profile.peaks) {
      peaks.push_back({{"mean", p.mean.str()}, {"width_minutes", p.width_minutes}, {"amplitude", p.amplitude}});
    }
    syn_groups[name] = {{"peaks", peaks}, {"store_affinity", profile.store_affinity}};
  }
  root["synthetic"] = {
      {"target_daily_visits", sp.target_daily_visits},
      {"daily_volume_jitter", sp.daily_volume_jitter},
      {"distribution_noise", sp.distribution_noise},
      {"temperature_sensitivity",
       {{"enabled", sp.temperature_sensitivity},
        {"band_low_c", sp.sensitivity_band_low_c},
        {"band_high_c", sp.sensitivity_band_high_c},
        {"per_degree", sp.sensitivity_per_degree}}},
      {"groups", syn_groups},
  };

  root["llm"] = {
      {"endpoint_url", c.llm.endpoint_url},
      {"model_name", c.llm.model_name},
      {"api_key_env_var", c.llm.api_key_env_var},
      {"sampling_temperature", c.llm.sampling_temperature},
      {"cache_dir", c.llm.cache_dir.string()},
      {"timeout_s", c.llm.timeout_s},
      {"max_retries", c.llm.max_retries},
  };
  return root.dump(2) + "\n";
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
  write_text_file_atomic(path, config_to_json(config));
}

std::vector<TimeOfDay> checkpoints(const MallConfig& mall) {
  std::vector<TimeOfDay> out;
  if (mall.checkpoint_minutes <= 0) return out;
  for (TimeOfDay t = mall.open_time; t < mall.close_time; t = t + mall.checkpoint_minutes) {
    out.push_back(t);
  }
  return out;
}

GroupProfile default_group_profile(const MallConfig& mall) {
  GroupProfile profile;
  const int span = mall.close_time - mall.open_time;
  profile.peaks.push_back({mall.open_time + span / 2, span / 4.0, 1.0});
  for (const auto& s : mall.stores) profile.store_affinity[s.name] = 1.0;
  return profile;
}

}  // namespace malltwin
