#include "malltwin/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "malltwin/errors.hpp"
#include "malltwin/random.hpp"

namespace malltwin {

double peak_intensity(const GroupProfile& profile, TimeOfDay t) {
  double sum = 0.0;
  for (const auto& p : profile.peaks) {
    const double d = static_cast<double>(t - p.mean);
    sum += p.amplitude * std::exp(-d * d / (2.0 * p.width_minutes * p.width_minutes));
  }
  return sum;
}

DaySchedule generate_day_synthetic(const ScenarioConfig& config, std::uint64_t seed, const std::string& day_id,
                                   const IndoorTrace& indoor_trace) {
  const auto& profile = config.synthetic;
  const auto times = checkpoints(config.mall);
  const auto fallback = default_group_profile(config.mall);
  std::vector<const GroupProfile*> group_profiles;
  for (const auto& g : config.groups) {
    const auto it = profile.groups.find(g.name);
    group_profiles.push_back(it == profile.groups.end() ? &fallback : &it->second);
  }

  double raw_total = 0.0;
  for (const auto* gp : group_profiles) {
    for (const auto t : times) raw_total += peak_intensity(*gp, t);
  }

  Rng rng(seed);
  const double volume = 1.0 + profile.daily_volume_jitter * (2.0 * rng.uniform() - 1.0);
  const double scale = raw_total > 0.0 ? profile.target_daily_visits * volume / raw_total : 0.0;
  const double sigma = profile.distribution_noise;

  DaySchedule day;
  day.day_id = day_id;
  day.source = "synthetic";
  for (const auto t : times) {
    double presence = 1.0;
    if (profile.temperature_sensitivity) {
      const auto it = indoor_trace.find(t);
      const double indoor = it == indoor_trace.end() ? kDefaultIndoorTempC : it->second;
      const double outside = std::max({0.0, profile.sensitivity_band_low_c - indoor, indoor - profile.sensitivity_band_high_c});
      presence = std::max(0.0, 1.0 - profile.sensitivity_per_degree * outside);
    }

    CheckpointEntry entry;
    entry.time = t;
    for (std::size_t gi = 0; gi < config.groups.size(); ++gi) {
      const auto& group = config.groups[gi];
      const auto& gp = *group_profiles[gi];
      entry.group_counts[group.name] = static_cast<int>(std::lround(scale * presence * peak_intensity(gp, t)));

      std::vector<double> weights;
      double total = 0.0;
      for (const auto& store : config.mall.stores) {
        const auto a = gp.store_affinity.find(store.name);
        const double affinity = a == gp.store_affinity.end() ? 0.0 : a->second;
        const double noise = std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
        weights.push_back(affinity * noise);
        total += weights.back();
      }
      auto& dist = entry.group_distributions[group.name];
      for (std::size_t s = 0; s < config.mall.stores.size(); ++s) {
        dist[config.mall.stores[s].name] =
            total > 0.0 ? weights[s] / total : 1.0 / static_cast<double>(config.mall.stores.size());
      }
    }
    day.entries.push_back(std::move(entry));
  }
  return day;
}

std::vector<DaySchedule> generate_synthetic_dataset(const ScenarioConfig& config, std::uint64_t seed, int days) {
  if (days <= 0) throw ConfigError("number of days must be positive");
  std::vector<DaySchedule> out;
  out.reserve(static_cast<std::size_t>(days));
  for (int i = 0; i < days; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "syn-s%llu-d%04d", static_cast<unsigned long long>(seed), i);
    out.push_back(generate_day_synthetic(config, derive_seed(seed, static_cast<std::uint64_t>(i)), id));
  }
  return out;
}

}  // namespace malltwin
