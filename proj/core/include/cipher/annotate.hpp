#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cipher/cluster.hpp"
#include "cipher/ingest.hpp"
#include "cipher/symbolic.hpp"

namespace cipher {

/// Pointwise statistics of a cluster's member curves.
struct ClusterSummary {
  int cluster = kNoise;
  std::size_t member_count = 0;
  std::vector<double> mean_curve;
  std::vector<double> lo_curve;  // 5th percentile
  std::vector<double> hi_curve;  // 95th percentile
  std::map<std::string, std::size_t> word_histogram;

  friend bool operator==(const ClusterSummary&, const ClusterSummary&) = default;
};

inline constexpr double kLoPercentile = 0.05;
inline constexpr double kHiPercentile = 0.95;

/// Linear interpolation between order statistics: with h = (n-1) q,
/// result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
double percentile_sorted(std::span<const double> sorted, double q);

/// Throws InvalidArgument for no members or members of unequal length.
/// `words`, when non-empty, must parallel `members` and fills the histogram.
ClusterSummary summarize(std::span<const std::vector<double>> members,
                         std::span<const IsaxWord> words = {});

struct MemberRef {
  WindowId id = 0;
  const std::vector<double>* values = nullptr;
  double strength = 0.0;
};

/// Index of the member with the smallest summed Euclidean distance to the
/// others; ties go to the lowest window id.
std::size_t medoid(std::span<const MemberRef> members);

/// The medoid, then n - 1 further members drawn one from each of n - 1
/// equal-count strata of the remaining members ordered by strength. Fully
/// determined by `seed`. Returns every member (medoid first) when n exceeds
/// the member count.
std::vector<WindowId> representatives(std::span<const MemberRef> members, std::size_t n,
                                      std::uint64_t seed);

struct LabelRecord {
  int cluster = kNoise;
  std::string label;
  std::string annotator;
  std::vector<WindowId> reviewed;
  std::string timestamp;  // ISO-8601 UTC
  std::string note;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

/// Checks the record against the cluster's members and, when non-empty, the
/// label taxonomy. Throws InvalidArgument describing the first violation.
void validate_label_record(const LabelRecord& record,
                           std::span<const WindowId> cluster_members,
                           std::span<const std::string> taxonomy);

/// Latest label per cluster when the records are replayed in order.
std::map<int, std::string> effective_labels(std::span<const LabelRecord> journal);

struct PropagatedLabel {
  WindowId window = 0;
  std::string label;
  int source_cluster = kNoise;
  double confidence = 0.0;

  friend bool operator==(const PropagatedLabel&, const PropagatedLabel&) = default;
};

/// Every window of a labeled cluster receives the cluster's effective label.
/// Noise and unlabeled clusters produce nothing. Output follows the order of
/// `assignments`.
std::vector<PropagatedLabel> propagate(std::span<const ClusterAssignment> assignments,
                                       const std::map<int, std::string>& labels);

struct CatalogRow {
  UtcSeconds start = 0;
  UtcSeconds end = 0;
  std::string channel;
  std::string label;
  int cluster = kNoise;
  double confidence = 0.0;

  friend bool operator==(const CatalogRow&, const CatalogRow&) = default;
};

/// Rows sorted by start time (then cluster). Windows missing from `windows`
/// throw NotFoundError.
std::vector<CatalogRow> build_catalog(std::span<const PropagatedLabel> propagated,
                                      const std::map<WindowId, Window>& windows);

inline constexpr const char* kCatalogHeader =
    "start_utc,end_utc,channel,label,cluster,confidence";

void write_catalog(std::ostream& out, std::span<const CatalogRow> rows);
/// Throws ParseError on malformed lines.
std::vector<CatalogRow> read_catalog(std::istream& in);

}  // namespace cipher
