#include "malltwin/time_of_day.hpp"

#include <charconv>
#include <cstdio>

#include "malltwin/errors.hpp"

namespace malltwin {

TimeOfDay TimeOfDay::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || text.size() - colon != 3) {
    throw ConfigError("invalid time-of-day '" + std::string(text) + "', expected HH:MM");
  }
  int hours = 0;
  int minutes = 0;
  const auto hour_part = text.substr(0, colon);
  const auto minute_part = text.substr(colon + 1);
  const auto h = std::from_chars(hour_part.data(), hour_part.data() + hour_part.size(), hours);
  const auto m = std::from_chars(minute_part.data(), minute_part.data() + minute_part.size(), minutes);
  if (h.ec != std::errc{} || h.ptr != hour_part.data() + hour_part.size() || m.ec != std::errc{} ||
      m.ptr != minute_part.data() + minute_part.size() || hours < 0 || hours > 24 || minutes < 0 ||
      minutes > 59 || (hours == 24 && minutes != 0)) {
    throw ConfigError("invalid time-of-day '" + std::string(text) + "', expected HH:MM");
  }
  return from_hm(hours, minutes);
}

std::string TimeOfDay::str() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes_ / 60, minutes_ % 60);
  return buf;
}

}  // namespace malltwin
