#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace malltwin {

// Minutes since midnight, within a single day.
class TimeOfDay {
public:
  constexpr TimeOfDay() = default;
  constexpr explicit TimeOfDay(int minutes) : minutes_(minutes) {}

  static TimeOfDay from_hm(int hours, int minutes) { return TimeOfDay(hours * 60 + minutes); }

  // Accepts "H:MM" or "HH:MM", 24-hour clock. Throws ConfigError.
  static TimeOfDay parse(std::string_view text);

  constexpr int minutes() const { return minutes_; }
  constexpr double hours() const { return minutes_ / 60.0; }

  // "HH:MM"
  std::string str() const;

  constexpr TimeOfDay operator+(int delta_minutes) const { return TimeOfDay(minutes_ + delta_minutes); }
  constexpr int operator-(TimeOfDay other) const { return minutes_ - other.minutes_; }

  constexpr auto operator<=>(const TimeOfDay&) const = default;

private:
  int minutes_ = 0;
};

}  // namespace malltwin
