#pragma once

#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/dqn/network.hpp"
#include "malltwin/environment.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// A zone controller: fixed setpoint, trained Q-network, or one policy per zone.
class Policy {
public:
  enum class Kind { Setpoint, Dqn, PerZone };

  // Throws ConfigError when temp_c is not on the action grid.
  static Policy setpoint(double temp_c);
  // `zone` names the zone the network was trained for; empty accepts any zone.
  static Policy dqn(dqn::QNetwork net, std::string zone = {});
  static Policy per_zone(std::vector<std::pair<std::string, Policy>> zone_policies);

  Kind kind() const { return kind_; }
  int setpoint_index() const { return setpoint_index_; }

  // Greedy action for the environment's current observation.
  // Throws MismatchError when the policy does not cover or fit the zone.
  int act(const ZoneEnvironment& env) const;

private:
  Kind kind_ = Kind::Setpoint;
  int setpoint_index_ = 0;
  std::shared_ptr<const dqn::QNetwork> net_;
  std::string zone_;
  std::vector<std::pair<std::string, Policy>> zones_;
};

struct DayScore {
  std::string day_id;
  double comfort_score = 0.0;  // sum of raw comfort scores
  double energy_kwh = 0.0;
  double energy_score = 0.0;  // w_e * sum of energy units
  double total_score = 0.0;   // w_c * comfort_score - energy_score
};

struct EvalReport {
  std::string policy_name;
  Topology topology = Topology::Centralized;
  RewardWeights weights;
  std::vector<DayScore> days;
  DayScore aggregate;  // sums over days
  std::vector<TraceRow> trace;

  double mean_setpoint_c() const;
  std::set<std::string> day_ids() const;
};

// Greedy online evaluation. Throws ConfigError on an empty day list or when a
// day appears in `training_day_ids`, MismatchError on topology/model mismatch.
EvalReport rollout(const Policy& policy, std::span<const DaySchedule> days, Topology topology,
                   const ScenarioConfig& config, const RewardWeights& weights, std::string policy_name = "policy",
                   const std::set<std::string>& training_day_ids = {});

struct ScoreStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single day
};

struct PolicySummary {
  std::string name;
  std::string topology;
  int days = 0;
  ScoreStats total;
  ScoreStats comfort;
  ScoreStats energy_score;
  ScoreStats energy_kwh;
  double mean_setpoint_c = 0.0;
};

struct PairwiseDifference {
  std::string first;
  std::string second;
  double total = 0.0;  // mean(first) - mean(second)
  double comfort = 0.0;
  double energy_score = 0.0;
};

struct ComparisonTable {
  std::vector<PolicySummary> rows;
  std::vector<PairwiseDifference> differences;

  const PolicySummary& row(std::string_view name) const;
  std::string to_csv() const;
  std::string differences_csv() const;
  std::string to_text() const;
};

// Throws ConfigError when reports cover different day sets.
ComparisonTable compare(std::span<const std::pair<std::string, EvalReport>> reports);

std::string trace_csv(std::span<const TraceRow> rows);
std::string report_to_json(const EvalReport& report);

// Rolls out every grid setpoint; CSV of temperature and mean scores.
std::string sweep_setpoints_csv(std::span<const DaySchedule> days, Topology topology, const ScenarioConfig& config,
                                const RewardWeights& weights);

}  // namespace malltwin
