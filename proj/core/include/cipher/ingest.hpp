#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cipher/timeutil.hpp"

namespace cipher {

/// One measured quantity in a source table.
struct ChannelSpec {
  std::string name;
  std::string unit;
  /// Zero-based field index in a row, counting the timestamp fields.
  std::size_t column = 0;
  /// Values equal to any of these mark a missing sample.
  std::vector<double> fill_values;
};

/// Uniformly sampled channel. Gaps are samples with missing[i] != 0, never
/// absent samples, so sample i is always at start + i * cadence.
struct TimeSeries {
  ChannelSpec channel;
  UtcSeconds start = 0;
  std::int64_t cadence = 60;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;

  std::size_t size() const noexcept { return values.size(); }
  UtcSeconds time_at(std::size_t i) const noexcept {
    return start + static_cast<UtcSeconds>(i) * cadence;
  }
};

using WindowId = std::uint64_t;

/// Fixed-length subsequence ("chunk") of a series.
struct Window {
  /// Slot index: offset / stride. Stable when neighbouring windows are dropped.
  WindowId id = 0;
  std::string channel;
  UtcSeconds start = 0;
  std::int64_t cadence = 60;
  std::size_t offset = 0;
  std::size_t length = 0;
  double missing_fraction = 0.0;

  UtcSeconds end() const noexcept {
    return start + static_cast<UtcSeconds>(length) * cadence;
  }
};

/// Reads a delimited numeric table. Rows start with either four OMNI time
/// fields (year, day-of-year, hour, minute) or one ISO-8601 timestamp.
/// Fields are separated by whitespace and/or commas. A first line that does
/// not start with a number is treated as a CSV header and skipped, as are
/// blank lines and lines starting with '#'.
///
/// Rows missing from the file become missing samples on the uniform grid.
/// Throws ParseError (with line number) for malformed rows and
/// StructuralError for non-monotone or off-grid timestamps.
std::vector<TimeSeries> parse_table(std::istream& source,
                                    std::span<const ChannelSpec> specs,
                                    std::int64_t cadence_seconds = 60);

/// Tiles `series` with windows of `chunk_seconds`, starting every
/// `stride_seconds`. Windows with missing_fraction > max_missing are dropped.
/// Throws ConfigError when chunk or stride is not a positive multiple of the
/// cadence.
std::vector<Window> segment(const TimeSeries& series, std::int64_t chunk_seconds,
                            std::int64_t stride_seconds, double max_missing);

/// Dense copy of the window with gaps linearly interpolated and edge gaps
/// extended from the nearest observed value. Throws InvalidArgument when
/// every sample is missing.
std::vector<double> fill_gaps(std::span<const double> values,
                              std::span<const std::uint8_t> missing);

std::vector<double> fill_gaps(const TimeSeries& series, const Window& window);

double missing_fraction(std::span<const std::uint8_t> missing);

}  // namespace cipher
