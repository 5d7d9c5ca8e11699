#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/time_of_day.hpp"

namespace malltwin {

using GroupCounts = std::map<std::string, int>;
using StoreDistribution = std::map<std::string, double>;

struct CheckpointEntry {
  TimeOfDay time;
  GroupCounts group_counts;
  std::map<std::string, StoreDistribution> group_distributions;

  bool operator==(const CheckpointEntry&) const = default;
};

// One simulated day: the exogenous occupancy trace an episode replays.
struct DaySchedule {
  std::string day_id;
  std::string source;  // "synthetic" or "llm"
  std::vector<CheckpointEntry> entries;

  int total_person_visits() const;

  // Entries aligned 1:1 with checkpoints(config.mall), every group present,
  // every distribution over known stores and summing to 1 within 1e-6.
  void validate(const ScenarioConfig& config) const;

  bool operator==(const DaySchedule&) const = default;
};

inline constexpr double kDistributionTolerance = 1e-6;

std::string schedule_to_json(const DaySchedule& day);
DaySchedule schedule_from_json(std::string_view text);

// One "<day_id>.json" per day.
void save_dataset(const std::vector<DaySchedule>& days, const std::filesystem::path& dir);
// Loads every "*.json" except manifest.json, sorted by day_id; validates each day.
std::vector<DaySchedule> load_dataset(const std::filesystem::path& dir, const ScenarioConfig& config);

}  // namespace malltwin
