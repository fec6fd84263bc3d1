#include "cipher/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "cipher/error.hpp"

namespace cipher {

namespace {

int parse_int(std::string_view s, std::string_view context) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("bad " + std::string(context) + " field '" +
                          std::string(s) + "'");
  }
  return value;
}

}  // namespace

UtcSeconds utc_from_civil(int year, unsigned month, unsigned day, int hour,
                          int minute, int second) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                           std::chrono::day{day}};
  if (!ymd.ok()) {
    throw InvalidArgument("invalid calendar date");
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<UtcSeconds>(days) * 86400 + hour * 3600 + minute * 60 +
         second;
}

UtcSeconds utc_from_doy(int year, int day_of_year, int hour, int minute,
                        int second) {
  using namespace std::chrono;
  const bool leap = std::chrono::year{year}.is_leap();
  if (day_of_year < 1 || day_of_year > (leap ? 366 : 365)) {
    throw InvalidArgument("day of year out of range: " +
                          std::to_string(day_of_year));
  }
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 ||
      second > 59) {
    throw InvalidArgument("time of day out of range");
  }
  return utc_from_civil(year, 1, 1) +
         static_cast<UtcSeconds>(day_of_year - 1) * 86400 + hour * 3600 +
         minute * 60 + second;
}

std::string format_iso8601(UtcSeconds t) {
  using namespace std::chrono;
  UtcSeconds days = t / 86400;
  UtcSeconds rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

UtcSeconds parse_iso8601(std::string_view text) {
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) {
    text.remove_suffix(1);
  }
  // YYYY-MM-DDTHH:MM or YYYY-MM-DDTHH:MM:SS
  if ((text.size() != 16 && text.size() != 19) || text[4] != '-' ||
      text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || (text.size() == 19 && text[16] != ':')) {
    throw InvalidArgument("not an ISO-8601 timestamp: '" + std::string(text) +
                          "'");
  }
  const int year = parse_int(text.substr(0, 4), "year");
  const int month = parse_int(text.substr(5, 2), "month");
  const int day = parse_int(text.substr(8, 2), "day");
  const int hour = parse_int(text.substr(11, 2), "hour");
  const int minute = parse_int(text.substr(14, 2), "minute");
  const int second = text.size() == 19 ? parse_int(text.substr(17, 2), "second") : 0;
  if (month < 1 || month > 12 || hour > 23 || minute > 59 || second > 59) {
    throw InvalidArgument("timestamp field out of range: '" +
                          std::string(text) + "'");
  }
  return utc_from_civil(year, static_cast<unsigned>(month),
                        static_cast<unsigned>(day), hour, minute, second);
}

std::int64_t parse_duration_seconds(std::string_view text) {
  if (text.empty()) {
    throw ConfigError("empty duration");
  }
  std::int64_t scale = 1;
  switch (text.back()) {
    case 's': scale = 1; text.remove_suffix(1); break;
    case 'm': scale = 60; text.remove_suffix(1); break;
    case 'h': scale = 3600; text.remove_suffix(1); break;
    case 'd': scale = 86400; text.remove_suffix(1); break;
    default: break;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("bad duration '" + std::string(text) + "'");
  }
  return value * scale;
}

}  // namespace cipher
