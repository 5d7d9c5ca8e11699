#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "malltwin/dqn/train_config.hpp"
#include "malltwin/time_of_day.hpp"

namespace malltwin {

inline constexpr int kConfigSchemaVersion = 1;

struct Store {
  std::string name;
  double area_m2 = 0.0;
  std::string description;
  std::string category;

  bool operator==(const Store&) const = default;
};

// The physical twin: floor area, opening hours, decision cadence.
struct MallConfig {
  std::string name = "Happy Mall";
  std::vector<Store> stores;
  double total_area_m2 = 4890.0;
  double ceiling_height_m = 3.0;
  TimeOfDay open_time = TimeOfDay::from_hm(10, 0);
  TimeOfDay close_time = TimeOfDay::from_hm(20, 0);
  int checkpoint_minutes = 30;
  int town_population = 50000;

  const Store* find_store(std::string_view store_name) const;
  void validate() const;

  bool operator==(const MallConfig&) const = default;
};

struct PopulationGroup {
  std::string name;
  std::string description;
  std::string thermal_preference;
  double comfort_low_c = 22.0;
  double comfort_high_c = 26.0;

  void validate() const;
  bool operator==(const PopulationGroup&) const = default;
};

struct RewardWeights {
  double w_c = 2.2;
  double w_e = 1.0 / 220.0;
  // Converts kWh into the unit the energy weight applies to (3600 -> kJ).
  double energy_units_per_kwh = 3600.0;

  void validate() const;
  bool operator==(const RewardWeights&) const = default;
};

struct EnergyModelParams {
  // kg/m^3
  double air_density_kg_per_m3 = 1.275;
  double heat_capacity_j_per_kg_k = 1000.0;
  double eer = 3.0;
  double ambient_temp_c = 30.0;
  // Optional per-checkpoint outdoor temperature; empty means constant ambient.
  std::vector<double> outdoor_temp_c_by_checkpoint;

  void validate() const;
  bool operator==(const EnergyModelParams&) const = default;
};

enum class StateLayout { GroupTotals, GroupByStore };

struct ObservationSettings {
  double occupancy_scale = 100.0;
  StateLayout layout = StateLayout::GroupTotals;

  bool operator==(const ObservationSettings&) const = default;
};

struct GaussianPeak {
  TimeOfDay mean = TimeOfDay::from_hm(14, 0);
  double width_minutes = 60.0;
  double amplitude = 1.0;

  bool operator==(const GaussianPeak&) const = default;
};

struct GroupProfile {
  std::vector<GaussianPeak> peaks;
  // store name -> nonnegative weight; absent stores weigh zero.
  std::map<std::string, double> store_affinity;

  bool operator==(const GroupProfile&) const = default;
};

// Drives the deterministic synthetic population generator.
struct SyntheticProfile {
  std::map<std::string, GroupProfile> groups;
  double target_daily_visits = 3000.0;
  double daily_volume_jitter = 0.04;
  double distribution_noise = 0.25;

  // Optional: scale counts down linearly outside a global comfort band.
  bool temperature_sensitivity = false;
  double sensitivity_band_low_c = 22.0;
  double sensitivity_band_high_c = 26.0;
  double sensitivity_per_degree = 0.1;

  bool operator==(const SyntheticProfile&) const = default;
};

struct LlmClientConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-3.5-turbo";
  std::string api_key_env_var = "OPENAI_API_KEY";
  double sampling_temperature = 0.0;
  std::filesystem::path cache_dir = "llm_cache";
  double timeout_s = 60.0;
  int max_retries = 3;

  bool operator==(const LlmClientConfig&) const = default;
};

// Everything loaded from one configuration file. Immutable after load.
struct ScenarioConfig {
  MallConfig mall;
  std::vector<PopulationGroup> groups;
  EnergyModelParams energy;
  RewardWeights reward;
  dqn::TrainConfig rl;
  ObservationSettings observation;
  SyntheticProfile synthetic;
  LlmClientConfig llm;

  const PopulationGroup* find_group(std::string_view group_name) const;
  std::vector<std::string> group_names() const;
  std::vector<std::string> store_names() const;

  // Checks every type invariant plus cross-references (profile names, outdoor trace length).
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ParseError on malformed JSON and ConfigError on invariant violations.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

// Decision times open, open+step, ... strictly before close.
std::vector<TimeOfDay> checkpoints(const MallConfig& mall);

// A default profile for groups the config does not describe: one afternoon peak,
// uniform store affinity.
GroupProfile default_group_profile(const MallConfig& mall);

}  // namespace malltwin
