#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// Group-count prompt for one checkpoint. Throws ConfigError on an empty group list.
std::string build_population_prompt(const MallConfig& mall, std::span<const PopulationGroup> groups, TimeOfDay now);

// Store-distribution prompt for one group. Throws ConfigError on non-finite temperature.
std::string build_distribution_prompt(const MallConfig& mall, const PopulationGroup& group, TimeOfDay now,
                                      double indoor_temp_c);

struct ParsedCounts {
  GroupCounts counts;  // one entry per configured group
  std::vector<std::string> warnings;
};

struct ParsedDistribution {
  StoreDistribution shares;  // one entry per store, sums to 1
  std::vector<std::string> warnings;
};

// "[group name]: [number]; [reason]" lines. Throws ParseError if no line names a group.
ParsedCounts parse_count_response(std::string_view text, std::span<const PopulationGroup> groups);

// "[store]: [percentile]; [reason]" lines, renormalized to shares.
// Throws ParseError when the matched percentages sum to zero.
ParsedDistribution parse_distribution_response(std::string_view text, std::span<const Store> stores);

}  // namespace malltwin
