#include "codev/calendar.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace codev {

namespace {

// Howard Hinnant's civil-days algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += (m <= 2);
}

bool parse_uint(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

bool valid_ymd(int y, int mo, int d) {
  if (mo < 1 || mo > 12 || d < 1) return false;
  static constexpr std::array<int, 12> len = {31, 28, 31, 30, 31, 30,
                                              31, 31, 30, 31, 30, 31};
  int md = len[mo - 1];
  bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (mo == 2 && leap) md = 29;
  return d <= md;
}

}  // namespace

Day day_from_ymd(int year, int month, int day) {
  return static_cast<Day>(days_from_civil(year, static_cast<unsigned>(month),
                                          static_cast<unsigned>(day)));
}

void ymd_from_day(Day d, int& year, int& month, int& day) {
  std::int64_t y;
  unsigned m, dd;
  civil_from_days(d, y, m, dd);
  year = static_cast<int>(y);
  month = static_cast<int>(m);
  day = static_cast<int>(dd);
}

std::optional<Day> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y, mo, d;
  if (!parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, mo) ||
      !parse_uint(s, 8, 2, d))
    return std::nullopt;
  if (!valid_ymd(y, mo, d)) return std::nullopt;
  return day_from_ymd(y, mo, d);
}

std::string format_date(Day d) {
  int y, mo, dd;
  ymd_from_day(d, y, mo, dd);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, mo, dd);
  return buf;
}

std::optional<Instant> parse_rfc3339(std::string_view s) {
  // date "T" HH:MM:SS [fraction] ("Z" | (+|-)HH:MM)
  if (s.size() < 20) return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  int hh, mm, ss;
  if (!parse_uint(s, 11, 2, hh) || s[13] != ':' || !parse_uint(s, 14, 2, mm) ||
      s[16] != ':' || !parse_uint(s, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;
  std::int64_t offset = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    if (pos + 1 != s.size()) return std::nullopt;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int oh, om;
    if (pos + 6 != s.size() || !parse_uint(s, pos + 1, 2, oh) ||
        s[pos + 3] != ':' || !parse_uint(s, pos + 4, 2, om))
      return std::nullopt;
    offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
  } else {
    return std::nullopt;
  }
  Instant t = static_cast<Instant>(*date) * 86400 + hh * 3600 + mm * 60 + ss;
  return t - offset;
}

std::string format_rfc3339(Instant t) {
  Day d = day_of_instant(t);
  Instant sec = t - static_cast<Instant>(d) * 86400;
  int y, mo, dd;
  ymd_from_day(d, y, mo, dd);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, dd,
                static_cast<int>(sec / 3600), static_cast<int>((sec / 60) % 60),
                static_cast<int>(sec % 60));
  return buf;
}

}  // namespace codev
