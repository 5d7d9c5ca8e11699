#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// Setpoint grid: min_c, min_c + step_c, ..., max_c.
struct ActionSpace {
  double min_c = 17.0;
  double max_c = 29.0;
  double step_c = 0.5;

  int size() const;
  double temperature(int index) const;
  // nullopt when the temperature is not on the grid.
  std::optional<int> index_of(double temperature_c) const;
};

inline constexpr int kNumActions = 25;
inline const ActionSpace kActionSpace{};

struct VoteTally {
  int increase = 0;  // too cold
  int decrease = 0;  // too hot
  int constant = 0;  // comfortable

  int total() const { return increase + decrease + constant; }
  bool operator==(const VoteTally&) const = default;
};

// A temperature-control region: the whole mall or one store.
struct Zone {
  std::string name;
  double area_m2 = 0.0;
  std::vector<std::string> stores;
};

enum class Topology { Centralized, Distributed };

std::string to_string(Topology topology);
// Throws ConfigError for anything but "centralized"/"distributed".
Topology parse_topology(std::string_view text);

// Centralized: one zone "mall" with every store and the full floor area.
// Distributed: one zone per store, named after it, with the store's area.
std::vector<Zone> make_zones(const MallConfig& mall, Topology topology);

// Persons per group (config order) in each zone: round(count x zone share), with
// largest-remainder rounding so each group's zone counts add up to
// round(count x covered share). Ties go to the lower zone index.
std::vector<std::vector<int>> apportion_occupancy(const CheckpointEntry& entry, std::span<const Zone> zones,
                                                  std::span<const PopulationGroup> groups);

// Single zone against the rest of the mall.
std::vector<int> occupancy(const CheckpointEntry& entry, const Zone& zone, std::span<const PopulationGroup> groups);

// Below a group's range votes "increase", above votes "decrease"; bounds are comfortable.
VoteTally cast_votes(std::span<const int> occupancy_by_group, std::span<const PopulationGroup> groups,
                     double indoor_temp_c);

// 2 per comfortable occupant, -1 per uncomfortable one.
double comfort_score(const VoteTally& votes);

// Cooling energy to hold the zone's air mass at the setpoint for one checkpoint:
// m c dT / EER with dT = max(0, ambient - setpoint), returned in kWh.
double energy_usage_kwh(const EnergyModelParams& params, const Zone& zone, double height_m, double setpoint_c);

struct RewardBreakdown {
  double comfort_score = 0.0;
  double energy_kwh = 0.0;
  // energy_kwh expressed in the unit w_e applies to.
  double energy_units = 0.0;
  double total = 0.0;
};

RewardBreakdown make_reward(const RewardWeights& weights, double comfort, double energy_kwh);

struct Observation {
  TimeOfDay time;
  VoteTally votes;
  double time_frac = 0.0;
  double outdoor_temp_c = 30.0;
  double indoor_temp_c = 25.0;
  std::vector<int> occupancy_by_group;  // config group order
  std::vector<int> occupancy_by_store;  // zone store order

  int occupancy() const;
};

// Fixed-length features: vote fractions (3), time_frac, scaled outdoor and
// indoor temperature, per-group occupancy / occupancy_scale, and with the
// group_by_store layout the per-store occupancy / occupancy_scale.
std::vector<double> encode_observation(const Observation& obs, const ScenarioConfig& config);
int feature_dim(const ScenarioConfig& config, const Zone& zone);

// Occupancy of one zone across a day: [checkpoint][group] and [checkpoint][store].
struct ZoneTrace {
  std::vector<std::vector<int>> by_group;
  std::vector<std::vector<int>> by_store;
};

std::vector<ZoneTrace> zone_traces(const ScenarioConfig& config, const DaySchedule& day, std::span<const Zone> zones);

struct StepResult {
  RewardBreakdown reward;
  Observation next;
  double setpoint_c = 0.0;
  bool done = false;
};

// One zone replaying one day; `config` must outlive it. A decision is taken at every checkpoint; the
// setpoint holds for the following interval and is judged by the occupants of
// the next checkpoint (nobody after closing).
class ZoneEnvironment {
public:
  ZoneEnvironment(const ScenarioConfig& config, Zone zone, ZoneTrace trace, RewardWeights weights);

  // Start of day, votes cast against the 25 degC pre-opening temperature.
  const Observation& reset();
  // Throws ConfigError on an out-of-range action or a finished episode.
  StepResult step(int action_index);

  const Observation& observation() const { return current_; }
  // encode_observation() of the current observation.
  std::vector<double> features() const;
  int feature_dim() const;
  // Most occupants present at any checkpoint of the day.
  int peak_occupancy() const;
  bool done() const { return index_ >= times_.size(); }
  int steps_per_episode() const { return static_cast<int>(times_.size()); }
  const Zone& zone() const { return zone_; }
  const RewardWeights& weights() const { return weights_; }

private:
  Observation observe(std::size_t index, double indoor_c) const;
  double outdoor_at(std::size_t index) const;

  const ScenarioConfig* config_;
  Zone zone_;
  ZoneTrace trace_;
  RewardWeights weights_;
  std::vector<TimeOfDay> times_;
  std::size_t index_ = 0;
  Observation current_;
};

inline constexpr double kPreOpeningTempC = 25.0;

struct TraceRow {
  std::string day_id;
  std::string zone;
  TimeOfDay time;
  double action_c = 0.0;
  double indoor_c = 0.0;
  int occupancy = 0;
  VoteTally votes;
  double comfort = 0.0;
  double energy_kwh = 0.0;
  double reward = 0.0;
};

std::string trace_csv_header();
std::string trace_csv_row(const TraceRow& row);

}  // namespace malltwin
