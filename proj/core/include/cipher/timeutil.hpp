#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cipher {

/// Seconds since 1970-01-01T00:00:00Z.
using UtcSeconds = std::int64_t;

UtcSeconds utc_from_civil(int year, unsigned month, unsigned day, int hour = 0,
                          int minute = 0, int second = 0);

/// OMNI-style timestamp: year, 1-based day of year, hour, minute.
UtcSeconds utc_from_doy(int year, int day_of_year, int hour, int minute,
                        int second = 0);

/// Formats as YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(UtcSeconds t);

/// Accepts YYYY-MM-DDTHH:MM[:SS][Z] and the same with a space separator.
/// Throws InvalidArgument on anything else.
UtcSeconds parse_iso8601(std::string_view text);

/// Parses "35h", "90m", "2100s", "2d" or a bare integer (seconds).
std::int64_t parse_duration_seconds(std::string_view text);

}  // namespace cipher
