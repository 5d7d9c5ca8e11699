#pragma once

#include <cstdint>
#include <string>

#include "malltwin/config.hpp"
#include "malltwin/llm.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// Expected (unscaled) presence of a group at a time: sum of its Gaussian peaks.
double peak_intensity(const GroupProfile& profile, TimeOfDay t);

// Deterministic stand-in for the LLM twin. Counts follow each group's peak
// profile scaled to the target daily visits; store shares are the group's
// affinities with seeded log-normal noise. Same seed, same schedule.
// `indoor_trace` only matters when the profile enables temperature sensitivity.
DaySchedule generate_day_synthetic(const ScenarioConfig& config, std::uint64_t seed, const std::string& day_id,
                                   const IndoorTrace& indoor_trace = {});

// "syn-s<seed>-d<index>" with the per-day seed derived from (seed, index).
std::vector<DaySchedule> generate_synthetic_dataset(const ScenarioConfig& config, std::uint64_t seed, int days);

}  // namespace malltwin
