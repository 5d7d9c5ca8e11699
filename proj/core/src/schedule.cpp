#include "malltwin/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

using nlohmann::json;

int DaySchedule::total_person_visits() const {
  int total = 0;
  for (const auto& e : entries) {
    for (const auto& [_, n] : e.group_counts) total += n;
  }
  return total;
}

void DaySchedule::validate(const ScenarioConfig& config) const {
  const auto times = checkpoints(config.mall);
  const std::string where = "day '" + day_id + "'";
  if (entries.size() != times.size()) {
    throw ConfigError(where + ": expected " + std::to_string(times.size()) + " checkpoint entries, found " +
                      std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string at = where + " at " + e.time.str();
    if (e.time != times[i]) {
      throw ConfigError(where + ": entry " + std::to_string(i) + " has time " + e.time.str() + ", expected " +
                        times[i].str());
    }
    for (const auto& g : config.groups) {
      const auto c = e.group_counts.find(g.name);
      if (c == e.group_counts.end()) throw ConfigError(at + ": missing count for group '" + g.name + "'");
      if (c->second < 0) throw ConfigError(at + ": negative count for group '" + g.name + "'");
      const auto d = e.group_distributions.find(g.name);
      if (d == e.group_distributions.end()) {
        throw ConfigError(at + ": missing distribution for group '" + g.name + "'");
      }
      double sum = 0.0;
      for (const auto& [store, frac] : d->second) {
        if (config.mall.find_store(store) == nullptr) {
          throw ConfigError(at + ": distribution of '" + g.name + "' names unknown store '" + store + "'");
        }
        if (!(frac >= 0.0 && frac <= 1.0)) {
          throw ConfigError(at + ": distribution of '" + g.name + "' has fraction outside [0,1]");
        }
        sum += frac;
      }
      if (std::abs(sum - 1.0) > kDistributionTolerance) {
        throw ConfigError(at + ": distribution of '" + g.name + "' sums to " + format_number(sum));
      }
    }
    for (const auto& [name, _] : e.group_counts) {
      if (config.find_group(name) == nullptr) throw ConfigError(at + ": unknown group '" + name + "'");
    }
  }
}

std::string schedule_to_json(const DaySchedule& day) {
  json entries = json::array();
  for (const auto& e : day.entries) {
    entries.push_back({{"time", e.time.str()},
                       {"group_counts", e.group_counts},
                       {"group_distributions", e.group_distributions}});
  }
  json root = {{"schema_version", 1}, {"day_id", day.day_id}, {"source", day.source}, {"entries", entries}};
  return root.dump(2) + "\n";
}

DaySchedule schedule_from_json(std::string_view text) {
  try {
    const json root = json::parse(text);
    DaySchedule day;
    day.day_id = root.at("day_id").get<std::string>();
    day.source = root.value("source", "");
    for (const auto& e : root.at("entries")) {
      CheckpointEntry entry;
      entry.time = TimeOfDay::parse(e.at("time").get<std::string>());
      entry.group_counts = e.at("group_counts").get<GroupCounts>();
      entry.group_distributions = e.at("group_distributions").get<std::map<std::string, StoreDistribution>>();
      day.entries.push_back(std::move(entry));
    }
    return day;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed day schedule JSON: ") + e.what());
  }
}

void save_dataset(const std::vector<DaySchedule>& days, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& day : days) {
    write_text_file_atomic(dir / (day.day_id + ".json"), schedule_to_json(day));
  }
}

std::vector<DaySchedule> load_dataset(const std::filesystem::path& dir, const ScenarioConfig& config) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("dataset directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "manifest.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<DaySchedule> days;
  std::set<std::string> ids;
  for (const auto& f : files) {
    DaySchedule day = schedule_from_json(read_text_file(f));
    day.validate(config);
    if (!ids.insert(day.day_id).second) throw ConfigError("duplicate day_id '" + day.day_id + "' in dataset");
    days.push_back(std::move(day));
  }
  if (days.empty()) throw ConfigError("dataset directory '" + dir.string() + "' contains no day files");
  std::sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.day_id < b.day_id; });
  return days;
}

}  // namespace malltwin
