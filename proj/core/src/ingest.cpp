#include "cipher/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string_view>

#include "cipher/error.hpp"

namespace cipher {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Comma-separated rows keep empty fields (they read as missing); otherwise
// any run of whitespace separates fields.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  if (line.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      fields.push_back(trim(line.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return fields;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r", pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

std::optional<double> to_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool looks_iso(std::string_view s) {
  return s.size() >= 16 && s[4] == '-' && s[7] == '-' &&
         (s[10] == 'T' || s[10] == 't');
}

bool starts_numeric(std::string_view s) {
  if (s.empty()) return false;
  const char c = s.front();
  return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

struct Row {
  UtcSeconds t;
  std::size_t line;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;
};

}  // namespace

std::vector<TimeSeries> parse_table(std::istream& source,
                                    std::span<const ChannelSpec> specs,
                                    std::int64_t cadence_seconds) {
  if (cadence_seconds <= 0) {
    throw ConfigError("cadence must be positive");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      if (specs[i].name == specs[j].name) {
        throw ConfigError("duplicate channel name '" + specs[i].name + "'");
      }
    }
  }

  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_fields(view);
    const bool first_content = !seen_content;
    seen_content = true;

    Row row{0, line_no, {}, {}};
    if (looks_iso(fields.front())) {
      try {
        row.t = parse_iso8601(fields.front());
      } catch (const InvalidArgument& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (starts_numeric(fields.front())) {
      if (fields.size() < 4) {
        throw ParseError(line_no, "expected year, day-of-year, hour, minute");
      }
      const auto y = to_int(fields[0]);
      const auto d = to_int(fields[1]);
      const auto h = to_int(fields[2]);
      const auto m = to_int(fields[3]);
      if (!y || !d || !h || !m) {
        throw ParseError(line_no, "non-integer timestamp field");
      }
      try {
        row.t = utc_from_doy(*y, *d, *h, *m);
      } catch (const InvalidArgument& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (first_content) {
      continue;  // header
    } else {
      throw ParseError(line_no, "row does not start with a timestamp");
    }

    row.values.reserve(specs.size());
    row.missing.reserve(specs.size());
    for (const auto& spec : specs) {
      if (spec.column >= fields.size()) {
        throw ParseError(line_no, "column " + std::to_string(spec.column) +
                                      " for channel '" + spec.name +
                                      "' not present");
      }
      const auto field = fields[spec.column];
      if (field.empty()) {
        row.values.push_back(std::nan(""));
        row.missing.push_back(1);
        continue;
      }
      const auto value = to_double(field);
      if (!value) {
        throw ParseError(line_no, "non-numeric value '" + std::string(field) +
                                      "' for channel '" + spec.name + "'");
      }
      const bool sentinel =
          std::isnan(*value) ||
          std::find(spec.fill_values.begin(), spec.fill_values.end(), *value) !=
              spec.fill_values.end();
      row.values.push_back(*value);
      row.missing.push_back(sentinel ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }

  std::vector<TimeSeries> out;
  if (rows.empty()) return out;

  const UtcSeconds start = rows.front().t;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].t <= rows[i - 1].t) {
      throw StructuralError("timestamps not strictly increasing at line " +
                            std::to_string(rows[i].line));
    }
  }
  for (const auto& row : rows) {
    if ((row.t - start) % cadence_seconds != 0) {
      throw StructuralError("timestamp at line " + std::to_string(row.line) +
                            " is off the " + std::to_string(cadence_seconds) +
                            " s grid");
    }
  }
  const auto length =
      static_cast<std::size_t>((rows.back().t - start) / cadence_seconds) + 1;

  out.reserve(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    TimeSeries ts;
    ts.channel = specs[c];
    ts.start = start;
    ts.cadence = cadence_seconds;
    ts.values.assign(length, std::nan(""));
    ts.missing.assign(length, 1);
    for (const auto& row : rows) {
      const auto i = static_cast<std::size_t>((row.t - start) / cadence_seconds);
      ts.values[i] = row.values[c];
      ts.missing[i] = row.missing[c];
    }
    out.push_back(std::move(ts));
  }
  return out;
}

double missing_fraction(std::span<const std::uint8_t> missing) {
  if (missing.empty()) return 0.0;
  const auto count = std::count_if(missing.begin(), missing.end(),
                                   [](std::uint8_t m) { return m != 0; });
  return static_cast<double>(count) / static_cast<double>(missing.size());
}

std::vector<Window> segment(const TimeSeries& series, std::int64_t chunk_seconds,
                            std::int64_t stride_seconds, double max_missing) {
  if (series.cadence <= 0) {
    throw ConfigError("cadence must be positive");
  }
  if (chunk_seconds <= 0 || chunk_seconds % series.cadence != 0) {
    throw ConfigError("chunk of " + std::to_string(chunk_seconds) +
                      " s is not a positive multiple of the " +
                      std::to_string(series.cadence) + " s cadence");
  }
  if (stride_seconds <= 0 || stride_seconds % series.cadence != 0) {
    throw ConfigError("stride of " + std::to_string(stride_seconds) +
                      " s is not a positive multiple of the " +
                      std::to_string(series.cadence) + " s cadence");
  }
  const auto chunk = static_cast<std::size_t>(chunk_seconds / series.cadence);
  const auto stride = static_cast<std::size_t>(stride_seconds / series.cadence);

  std::vector<Window> windows;
  const std::span<const std::uint8_t> mask(series.missing);
  for (std::size_t offset = 0; offset + chunk <= series.size(); offset += stride) {
    Window w;
    w.id = offset / stride;
    w.channel = series.channel.name;
    w.start = series.time_at(offset);
    w.cadence = series.cadence;
    w.offset = offset;
    w.length = chunk;
    w.missing_fraction = missing_fraction(mask.subspan(offset, chunk));
    if (w.missing_fraction <= max_missing) {
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

std::vector<double> fill_gaps(std::span<const double> values,
                              std::span<const std::uint8_t> missing) {
  if (values.size() != missing.size()) {
    throw InvalidArgument("values and missing mask differ in length");
  }
  const std::size_t n = values.size();
  std::vector<double> out(values.begin(), values.end());

  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (missing[i]) continue;
    if (!prev) {
      for (std::size_t j = 0; j < i; ++j) out[j] = values[i];
    } else if (i > *prev + 1) {
      const double a = values[*prev];
      const double b = values[i];
      const double span = static_cast<double>(i - *prev);
      for (std::size_t j = *prev + 1; j < i; ++j) {
        out[j] = a + (b - a) * static_cast<double>(j - *prev) / span;
      }
    }
    prev = i;
  }
  if (!prev) {
    throw InvalidArgument("window is entirely missing");
  }
  for (std::size_t j = *prev + 1; j < n; ++j) out[j] = values[*prev];
  return out;
}

std::vector<double> fill_gaps(const TimeSeries& series, const Window& window) {
  if (window.offset + window.length > series.size()) {
    throw InvalidArgument("window extends past the end of the series");
  }
  return fill_gaps(
      std::span<const double>(series.values).subspan(window.offset, window.length),
      std::span<const std::uint8_t>(series.missing).subspan(window.offset,
                                                            window.length));
}

}  // namespace cipher
