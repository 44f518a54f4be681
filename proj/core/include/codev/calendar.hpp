#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace codev {

// Calendar day as days since 1970-01-01 (UTC). Negative values are valid.
using Day = std::int32_t;

// Instant as seconds since the Unix epoch (UTC).
using Instant = std::int64_t;

Day day_from_ymd(int year, int month, int day);
void ymd_from_day(Day d, int& year, int& month, int& day);

// "YYYY-MM-DD"
std::optional<Day> parse_date(std::string_view s);
std::string format_date(Day d);

// RFC-3339 timestamp, e.g. "2019-05-30T12:34:56Z" or with a numeric offset.
std::optional<Instant> parse_rfc3339(std::string_view s);
std::string format_rfc3339(Instant t);

// Floor of an instant to its UTC calendar day.
inline Day day_of_instant(Instant t) {
  const Instant spd = 86400;
  Instant d = t >= 0 ? t / spd : -((-t + spd - 1) / spd);
  return static_cast<Day>(d);
}

}  // namespace codev
