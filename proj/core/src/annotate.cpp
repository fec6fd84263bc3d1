#include "cipher/annotate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "cipher/error.hpp"

namespace cipher {

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ClusterSummary summarize(std::span<const std::vector<double>> members,
                         std::span<const IsaxWord> words) {
  if (members.empty()) throw InvalidArgument("cannot summarize an empty cluster");
  const std::size_t len = members.front().size();
  for (const auto& m : members) {
    if (m.size() != len) throw InvalidArgument("cluster members differ in length");
  }
  if (!words.empty() && words.size() != members.size()) {
    throw InvalidArgument("word count does not match member count");
  }
  ClusterSummary s;
  s.member_count = members.size();
  s.mean_curve.resize(len);
  s.lo_curve.resize(len);
  s.hi_curve.resize(len);
  std::vector<double> column(members.size());
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      column[k] = members[k][t];
      sum += column[k];
    }
    s.mean_curve[t] = sum / static_cast<double>(members.size());
    std::sort(column.begin(), column.end());
    s.lo_curve[t] = percentile_sorted(column, kLoPercentile);
    s.hi_curve[t] = percentile_sorted(column, kHiPercentile);
  }
  for (const auto& w : words) ++s.word_histogram[to_string(w)];
  return s;
}

std::size_t medoid(std::span<const MemberRef> members) {
  if (members.empty()) throw InvalidArgument("medoid of an empty set");
  const std::size_t m = members.size();
  std::vector<double> total(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto& a = *members[i].values;
      const auto& b = *members[j].values;
      if (a.size() != b.size()) throw InvalidArgument("members differ in length");
      double s = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
      const double d = std::sqrt(s);
      total[i] += d;
      total[j] += d;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (total[i] < total[best] ||
        (total[i] == total[best] && members[i].id < members[best].id)) {
      best = i;
    }
  }
  return best;
}

namespace {

// Uniform in [0, bound) by rejection, so the stream of picks is the same on
// every standard library (std::uniform_int_distribution is not).
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % bound;
  while (true) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

}  // namespace

std::vector<WindowId> representatives(std::span<const MemberRef> members, std::size_t n,
                                      std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("representative count must be >= 1");
  if (members.empty()) return {};
  const std::size_t centre = medoid(members);

  std::vector<const MemberRef*> rest;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i != centre) rest.push_back(&members[i]);
  }
  std::sort(rest.begin(), rest.end(), [](const MemberRef* a, const MemberRef* b) {
    return a->strength != b->strength ? a->strength < b->strength : a->id < b->id;
  });

  std::vector<WindowId> out{members[centre].id};
  if (n >= members.size()) {
    for (const auto* r : rest) out.push_back(r->id);
    return out;
  }
  std::mt19937_64 rng(seed);
  const std::size_t strata = n - 1;
  const std::size_t m = rest.size();
  for (std::size_t k = 0; k < strata; ++k) {
    const std::size_t lo = k * m / strata;
    const std::size_t hi = (k + 1) * m / strata;
    out.push_back(rest[lo + draw(rng, hi - lo)]->id);
  }
  return out;
}

void validate_label_record(const LabelRecord& record,
                           std::span<const WindowId> cluster_members,
                           std::span<const std::string> taxonomy) {
  if (record.label.empty()) throw InvalidArgument("label must not be empty");
  if (!taxonomy.empty() &&
      std::find(taxonomy.begin(), taxonomy.end(), record.label) == taxonomy.end()) {
    throw InvalidArgument("label '" + record.label + "' is not in the taxonomy");
  }
  if (record.annotator.empty()) throw InvalidArgument("annotator must not be empty");
  if (record.reviewed.empty()) {
    throw InvalidArgument("reviewed must list at least one inspected window");
  }
  const std::set<WindowId> members(cluster_members.begin(), cluster_members.end());
  for (auto id : record.reviewed) {
    if (!members.count(id)) {
      throw InvalidArgument("reviewed window " + std::to_string(id) +
                            " is not a member of cluster " +
                            std::to_string(record.cluster));
    }
  }
}

std::map<int, std::string> effective_labels(std::span<const LabelRecord> journal) {
  std::map<int, std::string> out;
  for (const auto& r : journal) out[r.cluster] = r.label;
  return out;
}

std::vector<PropagatedLabel> propagate(std::span<const ClusterAssignment> assignments,
                                       const std::map<int, std::string>& labels) {
  std::vector<PropagatedLabel> out;
  for (const auto& a : assignments) {
    if (a.cluster == kNoise) continue;
    const auto it = labels.find(a.cluster);
    if (it == labels.end()) continue;
    out.push_back(PropagatedLabel{a.window, it->second, a.cluster, a.membership_strength});
  }
  return out;
}

std::vector<CatalogRow> build_catalog(std::span<const PropagatedLabel> propagated,
                                      const std::map<WindowId, Window>& windows) {
  std::vector<CatalogRow> rows;
  rows.reserve(propagated.size());
  for (const auto& p : propagated) {
    const auto it = windows.find(p.window);
    if (it == windows.end()) {
      throw NotFoundError("window " + std::to_string(p.window) + " not in the window store");
    }
    const Window& w = it->second;
    rows.push_back(CatalogRow{w.start, w.end(), w.channel, p.label, p.source_cluster,
                              p.confidence});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CatalogRow& a, const CatalogRow& b) {
    return a.start != b.start ? a.start < b.start : a.cluster < b.cluster;
  });
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  return fields;
}

}  // namespace

void write_catalog(std::ostream& out, std::span<const CatalogRow> rows) {
  out << kCatalogHeader << '\n';
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.confidence);
    out << format_iso8601(r.start) << ',' << format_iso8601(r.end) << ','
        << csv_field(r.channel) << ',' << csv_field(r.label) << ',' << r.cluster << ','
        << buf << '\n';
  }
}

std::vector<CatalogRow> read_catalog(std::istream& in) {
  std::vector<CatalogRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kCatalogHeader) throw ParseError(1, "unexpected catalog header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != 6) throw ParseError(line_no, "expected 6 fields");
    CatalogRow r;
    try {
      r.start = parse_iso8601(f[0]);
      r.end = parse_iso8601(f[1]);
      r.cluster = std::stoi(f[4]);
      r.confidence = std::stod(f[5]);
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
    r.channel = f[2];
    r.label = f[3];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cipher
