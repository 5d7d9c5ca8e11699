#include "malltwin/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "malltwin/dqn/trainer.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

Policy Policy::setpoint(double temp_c) {
  const auto idx = kActionSpace.index_of(temp_c);
  if (!idx) throw ConfigError("setpoint " + format_number(temp_c) + " degC is not on the 17..29 step 0.5 grid");
  Policy p;
  p.kind_ = Kind::Setpoint;
  p.setpoint_index_ = *idx;
  return p;
}

Policy Policy::dqn(dqn::QNetwork net, std::string zone) {
  if (net.output_dim() != kActionSpace.size()) {
    throw MismatchError("Q-network has " + std::to_string(net.output_dim()) + " outputs, expected " +
                        std::to_string(kActionSpace.size()));
  }
  Policy p;
  p.kind_ = Kind::Dqn;
  p.net_ = std::make_shared<const dqn::QNetwork>(std::move(net));
  p.zone_ = std::move(zone);
  return p;
}

Policy Policy::per_zone(std::vector<std::pair<std::string, Policy>> zone_policies) {
  Policy p;
  p.kind_ = Kind::PerZone;
  p.zones_ = std::move(zone_policies);
  return p;
}

int Policy::act(const ZoneEnvironment& env) const {
  switch (kind_) {
    case Kind::Setpoint:
      return setpoint_index_;
    case Kind::Dqn: {
      if (!zone_.empty() && zone_ != env.zone().name) {
        throw MismatchError("model trained for zone '" + zone_ + "' used on zone '" + env.zone().name + "'");
      }
      if (net_->input_dim() != env.feature_dim()) {
        throw MismatchError("model expects " + std::to_string(net_->input_dim()) + " features, zone '" +
                            env.zone().name + "' provides " + std::to_string(env.feature_dim()));
      }
      return dqn::argmax(net_->forward(env.features()));
    }
    case Kind::PerZone: {
      const auto it = std::find_if(zones_.begin(), zones_.end(), [&](const auto& z) { return z.first == env.zone().name; });
      if (it == zones_.end()) throw MismatchError("no policy for zone '" + env.zone().name + "'");
      return it->second.act(env);
    }
  }
  return 0;
}

double EvalReport::mean_setpoint_c() const {
  if (trace.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : trace) sum += r.action_c;
  return sum / static_cast<double>(trace.size());
}

std::set<std::string> EvalReport::day_ids() const {
  std::set<std::string> ids;
  for (const auto& d : days) ids.insert(d.day_id);
  return ids;
}

EvalReport rollout(const Policy& policy, std::span<const DaySchedule> days, Topology topology,
                   const ScenarioConfig& config, const RewardWeights& weights, std::string policy_name,
                   const std::set<std::string>& training_day_ids) {
  if (days.empty()) throw ConfigError("rollout needs at least one day");
  for (const auto& day : days) {
    if (training_day_ids.contains(day.day_id)) {
      throw ConfigError("day '" + day.day_id + "' was used for training; evaluation days must be held out");
    }
  }

  EvalReport report;
  report.policy_name = std::move(policy_name);
  report.topology = topology;
  report.weights = weights;
  report.aggregate.day_id = "all";
  const auto zones = make_zones(config.mall, topology);

  for (const auto& day : days) {
    DayScore score;
    score.day_id = day.day_id;
    double energy_units = 0.0;
    auto traces = zone_traces(config, day, zones);
    for (std::size_t z = 0; z < zones.size(); ++z) {
      ZoneEnvironment env(config, zones[z], std::move(traces[z]), weights);
      while (!env.done()) {
        const TimeOfDay decided_at = env.observation().time;
        const StepResult step = env.step(policy.act(env));
        score.comfort_score += step.reward.comfort_score;
        score.energy_kwh += step.reward.energy_kwh;
        energy_units += step.reward.energy_units;
        report.trace.push_back({day.day_id, zones[z].name, decided_at, step.setpoint_c, step.next.indoor_temp_c,
                                step.next.occupancy(), step.next.votes, step.reward.comfort_score,
                                step.reward.energy_kwh, step.reward.total});
      }
    }
    score.energy_score = weights.w_e * energy_units;
    score.total_score = weights.w_c * score.comfort_score - score.energy_score;
    report.aggregate.comfort_score += score.comfort_score;
    report.aggregate.energy_kwh += score.energy_kwh;
    report.aggregate.energy_score += score.energy_score;
    report.aggregate.total_score += score.total_score;
    report.days.push_back(std::move(score));
  }
  return report;
}

namespace {

ScoreStats stats_of(std::span<const DayScore> days, double DayScore::*field) {
  ScoreStats s;
  if (days.empty()) return s;
  for (const auto& d : days) s.mean += d.*field;
  s.mean /= static_cast<double>(days.size());
  if (days.size() > 1) {
    double ss = 0.0;
    for (const auto& d : days) ss += (d.*field - s.mean) * (d.*field - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(days.size() - 1));
  }
  return s;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

const PolicySummary& ComparisonTable::row(std::string_view name) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.name == name; });
  if (it == rows.end()) throw ConfigError("no comparison row named '" + std::string(name) + "'");
  return *it;
}

ComparisonTable compare(std::span<const std::pair<std::string, EvalReport>> reports) {
  ComparisonTable table;
  if (reports.empty()) return table;
  const auto reference = reports.front().second.day_ids();
  for (const auto& [name, report] : reports) {
    if (report.day_ids() != reference) {
      throw ConfigError("report '" + name + "' covers a different day set than '" + reports.front().first + "'");
    }
    PolicySummary row;
    row.name = name;
    row.topology = to_string(report.topology);
    row.days = static_cast<int>(report.days.size());
    row.total = stats_of(report.days, &DayScore::total_score);
    row.comfort = stats_of(report.days, &DayScore::comfort_score);
    row.energy_score = stats_of(report.days, &DayScore::energy_score);
    row.energy_kwh = stats_of(report.days, &DayScore::energy_kwh);
    row.mean_setpoint_c = report.mean_setpoint_c();
    table.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      table.differences.push_back({a.name, b.name, a.total.mean - b.total.mean, a.comfort.mean - b.comfort.mean,
                                   a.energy_score.mean - b.energy_score.mean});
    }
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::string out =
      "policy,topology,days,total_mean,total_std,comfort_mean,comfort_std,energy_score_mean,energy_score_std,"
      "energy_kwh_mean,energy_kwh_std,mean_setpoint_c\n";
  for (const auto& r : rows) {
    out += r.name + "," + r.topology + "," + std::to_string(r.days) + "," + format_number(r.total.mean) + "," +
           format_number(r.total.stddev) + "," + format_number(r.comfort.mean) + "," + format_number(r.comfort.stddev) +
           "," + format_number(r.energy_score.mean) + "," + format_number(r.energy_score.stddev) + "," +
           format_number(r.energy_kwh.mean) + "," + format_number(r.energy_kwh.stddev) + "," +
           format_number(r.mean_setpoint_c) + "\n";
  }
  return out;
}

std::string ComparisonTable::differences_csv() const {
  std::string out = "first,second,total_diff,comfort_diff,energy_score_diff\n";
  for (const auto& d : differences) {
    out += d.first + "," + d.second + "," + format_number(d.total) + "," + format_number(d.comfort) + "," +
           format_number(d.energy_score) + "\n";
  }
  return out;
}

std::string ComparisonTable::to_text() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-12s %22s %22s %20s %9s\n", "policy", "topology", "total (mean±std)",
                "comfort (mean±std)", "energy (mean±std)", "setpoint");
  out += line;
  for (const auto& r : rows) {
    const auto pm = [](const ScoreStats& s, int d) { return fixed(s.mean, d) + " ± " + fixed(s.stddev, d); };
    std::snprintf(line, sizeof(line), "%-24s %-12s %22s %22s %20s %9s\n", r.name.c_str(), r.topology.c_str(),
                  pm(r.total, 1).c_str(), pm(r.comfort, 1).c_str(), pm(r.energy_score, 2).c_str(),
                  fixed(r.mean_setpoint_c, 2).c_str());
    out += line;
  }
  if (!differences.empty()) {
    out += "\npairwise mean differences (first - second)\n";
    for (const auto& d : differences) {
      std::snprintf(line, sizeof(line), "  %-24s vs %-24s total %+10.1f  comfort %+10.1f  energy %+8.2f\n",
                    d.first.c_str(), d.second.c_str(), d.total, d.comfort, d.energy_score);
      out += line;
    }
  }
  return out;
}

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = trace_csv_header();
  for (const auto& r : rows) out += trace_csv_row(r);
  return out;
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::json;
  const auto day_json = [](const DayScore& d) {
    return json{{"day_id", d.day_id},
                {"comfort_score", d.comfort_score},
                {"energy_kwh", d.energy_kwh},
                {"energy_score", d.energy_score},
                {"total_score", d.total_score}};
  };
  json days = json::array();
  for (const auto& d : report.days) days.push_back(day_json(d));
  const json root = {
      {"policy", report.policy_name},
      {"topology", to_string(report.topology)},
      {"weights", {{"w_c", report.weights.w_c}, {"w_e", report.weights.w_e}, {"energy_units_per_kwh", report.weights.energy_units_per_kwh}}},
      {"days", days},
      {"aggregate", day_json(report.aggregate)},
      {"mean_setpoint_c", report.mean_setpoint_c()},
  };
  return root.dump(2) + "\n";
}

std::string sweep_setpoints_csv(std::span<const DaySchedule> days, Topology topology, const ScenarioConfig& config,
                                const RewardWeights& weights) {
  std::string out = "setpoint_c,total_mean,total_std,comfort_mean,energy_score_mean,energy_kwh_mean\n";
  for (int i = 0; i < kActionSpace.size(); ++i) {
    const double t = kActionSpace.temperature(i);
    const auto report = rollout(Policy::setpoint(t), days, topology, config, weights, "setpoint");
    const auto total = stats_of(report.days, &DayScore::total_score);
    out += format_number(t) + "," + format_number(total.mean) + "," + format_number(total.stddev) + "," +
           format_number(stats_of(report.days, &DayScore::comfort_score).mean) + "," +
           format_number(stats_of(report.days, &DayScore::energy_score).mean) + "," +
           format_number(stats_of(report.days, &DayScore::energy_kwh).mean) + "\n";
  }
  return out;
}

}  // namespace malltwin
