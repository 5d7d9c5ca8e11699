#include "malltwin/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

int ActionSpace::size() const { return static_cast<int>(std::lround((max_c - min_c) / step_c)) + 1; }

double ActionSpace::temperature(int index) const { return min_c + index * step_c; }

std::optional<int> ActionSpace::index_of(double temperature_c) const {
  if (!std::isfinite(temperature_c)) return std::nullopt;
  const double pos = (temperature_c - min_c) / step_c;
  const long idx = std::lround(pos);
  if (std::abs(pos - static_cast<double>(idx)) > 1e-9 || idx < 0 || idx >= size()) return std::nullopt;
  return static_cast<int>(idx);
}

std::string to_string(Topology topology) {
  return topology == Topology::Centralized ? "centralized" : "distributed";
}

Topology parse_topology(std::string_view text) {
  if (text == "centralized") return Topology::Centralized;
  if (text == "distributed") return Topology::Distributed;
  throw ConfigError("unknown topology '" + std::string(text) + "' (expected centralized or distributed)");
}

std::vector<Zone> make_zones(const MallConfig& mall, Topology topology) {
  std::vector<Zone> zones;
  if (topology == Topology::Centralized) {
    Zone all{"mall", mall.total_area_m2, {}};
    for (const auto& s : mall.stores) all.stores.push_back(s.name);
    zones.push_back(std::move(all));
  } else {
    for (const auto& s : mall.stores) zones.push_back(Zone{s.name, s.area_m2, {s.name}});
  }
  return zones;
}

namespace {

double zone_share(const StoreDistribution& dist, const Zone& zone) {
  double share = 0.0;
  for (const auto& s : zone.stores) {
    const auto it = dist.find(s);
    if (it != dist.end()) share += it->second;
  }
  return share;
}

// Largest-remainder split of `count` over quotas proportional to `shares`.
std::vector<int> largest_remainder(int count, std::span<const double> shares) {
  const double covered = std::accumulate(shares.begin(), shares.end(), 0.0);
  const long target = std::clamp<long>(std::lround(count * covered), 0, count);
  std::vector<int> out(shares.size(), 0);
  std::vector<double> remainder(shares.size(), 0.0);
  long assigned = 0;
  for (std::size_t z = 0; z < shares.size(); ++z) {
    const double quota = count * shares[z];
    out[z] = static_cast<int>(std::floor(quota));
    remainder[z] = quota - out[z];
    assigned += out[z];
  }
  long left = std::clamp<long>(target - assigned, 0, static_cast<long>(shares.size()));
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; i < order.size() && left > 0; ++i, --left) ++out[order[i]];
  return out;
}

}  // namespace

std::vector<std::vector<int>> apportion_occupancy(const CheckpointEntry& entry, std::span<const Zone> zones,
                                                  std::span<const PopulationGroup> groups) {
  std::vector<std::vector<int>> out(zones.size(), std::vector<int>(groups.size(), 0));
  std::vector<double> shares(zones.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto c = entry.group_counts.find(groups[g].name);
    const auto d = entry.group_distributions.find(groups[g].name);
    if (c == entry.group_counts.end() || d == entry.group_distributions.end() || c->second <= 0) continue;
    for (std::size_t z = 0; z < zones.size(); ++z) shares[z] = zone_share(d->second, zones[z]);
    const auto split = largest_remainder(c->second, shares);
    for (std::size_t z = 0; z < zones.size(); ++z) out[z][g] = split[z];
  }
  return out;
}

std::vector<int> occupancy(const CheckpointEntry& entry, const Zone& zone, std::span<const PopulationGroup> groups) {
  return apportion_occupancy(entry, std::span<const Zone>(&zone, 1), groups).front();
}

VoteTally cast_votes(std::span<const int> occupancy_by_group, std::span<const PopulationGroup> groups,
                     double indoor_temp_c) {
  VoteTally votes;
  for (std::size_t g = 0; g < groups.size() && g < occupancy_by_group.size(); ++g) {
    const int n = occupancy_by_group[g];
    if (indoor_temp_c < groups[g].comfort_low_c) {
      votes.increase += n;
    } else if (indoor_temp_c > groups[g].comfort_high_c) {
      votes.decrease += n;
    } else {
      votes.constant += n;
    }
  }
  return votes;
}

double comfort_score(const VoteTally& votes) {
  return 2.0 * votes.constant - 1.0 * (votes.increase + votes.decrease);
}

double energy_usage_kwh(const EnergyModelParams& params, const Zone& zone, double height_m, double setpoint_c) {
  const double delta_t = std::max(0.0, params.ambient_temp_c - setpoint_c);
  const double mass_kg = zone.area_m2 * height_m * params.air_density_kg_per_m3;
  const double joules = mass_kg * params.heat_capacity_j_per_kg_k * delta_t / params.eer;
  return joules / 3.6e6;
}

RewardBreakdown make_reward(const RewardWeights& weights, double comfort, double energy_kwh) {
  RewardBreakdown r;
  r.comfort_score = comfort;
  r.energy_kwh = energy_kwh;
  r.energy_units = energy_kwh * weights.energy_units_per_kwh;
  r.total = weights.w_c * comfort - weights.w_e * r.energy_units;
  return r;
}

int Observation::occupancy() const { return std::accumulate(occupancy_by_group.begin(), occupancy_by_group.end(), 0); }

int feature_dim(const ScenarioConfig& config, const Zone& zone) {
  int dim = 6 + static_cast<int>(config.groups.size());
  if (config.observation.layout == StateLayout::GroupByStore) dim += static_cast<int>(zone.stores.size());
  return dim;
}

std::vector<double> encode_observation(const Observation& obs, const ScenarioConfig& config) {
  std::vector<double> f;
  f.reserve(6 + obs.occupancy_by_group.size() + obs.occupancy_by_store.size());
  const double occ = std::max(1, obs.occupancy());
  f.push_back(obs.votes.increase / occ);
  f.push_back(obs.votes.decrease / occ);
  f.push_back(obs.votes.constant / occ);
  f.push_back(obs.time_frac);
  f.push_back((obs.outdoor_temp_c - kActionSpace.min_c) / (kActionSpace.max_c - kActionSpace.min_c));
  f.push_back((obs.indoor_temp_c - kActionSpace.min_c) / (kActionSpace.max_c - kActionSpace.min_c));
  const double scale = config.observation.occupancy_scale;
  for (int n : obs.occupancy_by_group) f.push_back(n / scale);
  if (config.observation.layout == StateLayout::GroupByStore) {
    for (int n : obs.occupancy_by_store) f.push_back(n / scale);
  }
  return f;
}

std::vector<ZoneTrace> zone_traces(const ScenarioConfig& config, const DaySchedule& day, std::span<const Zone> zones) {
  std::vector<ZoneTrace> traces(zones.size());
  const bool per_store = config.observation.layout == StateLayout::GroupByStore;
  const auto store_zones = make_zones(config.mall, Topology::Distributed);
  for (const auto& entry : day.entries) {
    const auto by_zone = apportion_occupancy(entry, zones, config.groups);
    std::vector<std::vector<int>> by_store;
    if (per_store) by_store = apportion_occupancy(entry, store_zones, config.groups);
    for (std::size_t z = 0; z < zones.size(); ++z) {
      traces[z].by_group.push_back(by_zone[z]);
      std::vector<int> stores;
      if (per_store) {
        for (const auto& name : zones[z].stores) {
          const auto it = std::find_if(store_zones.begin(), store_zones.end(), [&](const Zone& s) { return s.name == name; });
          const auto& counts = by_store[static_cast<std::size_t>(it - store_zones.begin())];
          stores.push_back(std::accumulate(counts.begin(), counts.end(), 0));
        }
      }
      traces[z].by_store.push_back(std::move(stores));
    }
  }
  return traces;
}

ZoneEnvironment::ZoneEnvironment(const ScenarioConfig& config, Zone zone, ZoneTrace trace, RewardWeights weights)
    : config_(&config),
      zone_(std::move(zone)),
      trace_(std::move(trace)),
      weights_(weights),
      times_(checkpoints(config.mall)) {
  if (trace_.by_group.size() != times_.size()) {
    throw ConfigError("zone trace for '" + zone_.name + "' has " + std::to_string(trace_.by_group.size()) +
                      " checkpoints, expected " + std::to_string(times_.size()));
  }
  reset();
}

double ZoneEnvironment::outdoor_at(std::size_t index) const {
  const auto& trace = config_->energy.outdoor_temp_c_by_checkpoint;
  if (trace.empty()) return config_->energy.ambient_temp_c;
  return trace[std::min(index, trace.size() - 1)];
}

Observation ZoneEnvironment::observe(std::size_t index, double indoor_c) const {
  Observation obs;
  const auto& mall = config_->mall;
  obs.time = index < times_.size() ? times_[index] : mall.close_time;
  obs.time_frac = static_cast<double>(obs.time - mall.open_time) / static_cast<double>(mall.close_time - mall.open_time);
  obs.outdoor_temp_c = outdoor_at(index);
  obs.indoor_temp_c = indoor_c;
  if (index < times_.size()) {
    obs.occupancy_by_group = trace_.by_group[index];
    obs.occupancy_by_store = trace_.by_store[index];
  } else {
    obs.occupancy_by_group.assign(config_->groups.size(), 0);
    obs.occupancy_by_store.assign(trace_.by_store.empty() ? 0 : trace_.by_store.front().size(), 0);
  }
  obs.votes = cast_votes(obs.occupancy_by_group, config_->groups, indoor_c);
  return obs;
}

const Observation& ZoneEnvironment::reset() {
  index_ = 0;
  current_ = observe(0, kPreOpeningTempC);
  return current_;
}

StepResult ZoneEnvironment::step(int action_index) {
  if (action_index < 0 || action_index >= kActionSpace.size()) {
    throw ConfigError("action index " + std::to_string(action_index) + " outside [0, " +
                      std::to_string(kActionSpace.size() - 1) + "]");
  }
  if (done()) throw ConfigError("step() called on a finished episode");

  StepResult result;
  result.setpoint_c = kActionSpace.temperature(action_index);
  EnergyModelParams params = config_->energy;
  params.ambient_temp_c = outdoor_at(index_);
  const double energy = energy_usage_kwh(params, zone_, config_->mall.ceiling_height_m, result.setpoint_c);

  ++index_;
  current_ = observe(index_, result.setpoint_c);
  result.next = current_;
  result.reward = make_reward(weights_, comfort_score(current_.votes), energy);
  result.done = done();
  return result;
}

std::vector<double> ZoneEnvironment::features() const { return encode_observation(current_, *config_); }

int ZoneEnvironment::feature_dim() const { return malltwin::feature_dim(*config_, zone_); }

int ZoneEnvironment::peak_occupancy() const {
  int peak = 0;
  for (const auto& counts : trace_.by_group) peak = std::max(peak, std::accumulate(counts.begin(), counts.end(), 0));
  return peak;
}

std::string trace_csv_header() {
  return "day_id,zone,time,action_c,indoor_c,occupancy,votes_inc,votes_dec,votes_const,comfort,energy_kwh,reward\n";
}

std::string trace_csv_row(const TraceRow& r) {
  std::string zone = r.zone;
  if (zone.find_first_of(",\"") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : zone) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    zone = quoted + "\"";
  }
  return r.day_id + "," + zone + "," + r.time.str() + "," + format_number(r.action_c) + "," +
         format_number(r.indoor_c) + "," + std::to_string(r.occupancy) + "," + std::to_string(r.votes.increase) + "," +
         std::to_string(r.votes.decrease) + "," + std::to_string(r.votes.constant) + "," + format_number(r.comfort) +
         "," + format_number(r.energy_kwh) + "," + format_number(r.reward) + "\n";
}

}  // namespace malltwin
