#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cipher/ingest.hpp"
#include "cipher/symbolic.hpp"

namespace cipher {

enum class Metric { kEuclidean, kMindist };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view text);

struct ClusterParams {
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 5;
  Metric metric = Metric::kEuclidean;
  bool recluster_noise = true;
  double relax_factor = 0.5;
  /// Let the root of the condensed tree be selected, so data with no stable
  /// split can come out as a single cluster.
  bool allow_single_cluster = false;

  void validate() const;
  /// Parameters of the relaxed noise pass.
  ClusterParams relaxed() const;
};

inline constexpr int kNoise = -1;

enum class Pass { kPrimary, kRelaxed };

std::string_view to_string(Pass p);
Pass parse_pass(std::string_view text);

struct ClusterAssignment {
  WindowId window = 0;
  int cluster = kNoise;
  Pass pass = Pass::kPrimary;
  double membership_strength = 0.0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Symmetric pairwise dissimilarities, evaluated lazily from the points.
class DistanceMatrix {
 public:
  static DistanceMatrix euclidean(std::vector<std::vector<double>> points);
  static DistanceMatrix mindist(std::vector<IsaxWord> words, std::size_t original_length);
  /// Row-major upper triangle without the diagonal: (0,1), (0,2), ... (n-2,n-1).
  static DistanceMatrix from_condensed(std::size_t n, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const;

  /// Rows/columns `keep`, in that order.
  DistanceMatrix subset(std::span<const std::size_t> keep) const;

 private:
  enum class Kind { kEuclidean, kMindist, kCondensed };
  Kind kind_ = Kind::kCondensed;
  std::size_t n_ = 0;
  std::vector<std::vector<double>> points_;
  std::vector<IsaxWord> words_;
  std::size_t original_length_ = 0;
  std::vector<double> condensed_;
};

/// Distance to the min_samples-th nearest point, counting the point itself as
/// the first (so min_samples 1 gives 0). Throws InvalidArgument when there
/// are fewer points than min_samples or min_samples is 0.
std::vector<double> core_distances(const DistanceMatrix& d, std::size_t min_samples);

inline double mutual_reachability(double d_ab, double core_a, double core_b) {
  double m = d_ab;
  if (core_a > m) m = core_a;
  if (core_b > m) m = core_b;
  return m;
}

struct MstEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

/// Prim's algorithm over the complete mutual-reachability graph, O(n^2).
/// Ties go to the lowest vertex index. Throws InvalidArgument for n < 2.
std::vector<MstEdge> mst(const DistanceMatrix& d, std::span<const double> core);

/// lambda = 1 / distance, capped for coincident points.
inline constexpr double kLambdaCap = 1e12;
double lambda_of(double distance);

/// Condensed cluster hierarchy. Points are 0..n-1, clusters n, n+1, ...
/// with n the root. Each point is the child of exactly one record: the
/// cluster it falls out of.
struct CondensedTree {
  struct Record {
    std::size_t parent = 0;
    std::size_t child = 0;
    double lambda = 0.0;
    std::size_t child_size = 0;
  };
  std::size_t n_points = 0;
  std::size_t min_cluster_size = 2;
  std::vector<Record> records;

  std::size_t root() const noexcept { return n_points; }
  bool is_cluster(std::size_t id) const noexcept { return id >= n_points; }
  std::string to_json() const;
};

/// Builds the single-linkage hierarchy from the MST, treating all edges of
/// equal weight as one level, then condenses it: a split is a real split only
/// when at least two parts have min_cluster_size points; smaller parts fall
/// out of the parent at that level.
CondensedTree condense(std::size_t n_points, std::span<const MstEdge> edges,
                       std::size_t min_cluster_size);

struct Extraction {
  std::vector<int> labels;        // kNoise or dense cluster ids ordered by lowest member
  std::vector<double> strengths;  // 0 for noise
  std::vector<double> stability;  // indexed by cluster id - n_points
  std::vector<std::size_t> selected;  // condensed-tree ids, in label order
};

/// Excess-of-mass selection. Ties between a cluster and its descendants go
/// to the cluster. The root is a candidate only with allow_single_cluster.
Extraction extract(const CondensedTree& tree, bool allow_single_cluster = false);

struct ClusteringResult {
  std::vector<int> labels;
  std::vector<double> strengths;
  CondensedTree tree;
};

/// One HDBSCAN pass. Fewer than max(2, min_samples, min_cluster_size) points
/// yields all noise.
ClusteringResult hdbscan(const DistanceMatrix& d, const ClusterParams& params);

/// Primary pass plus, when enabled, one relaxed pass over the primary noise.
/// `ids[i]` names row i of `d`. Relaxed cluster ids continue after the
/// primary ones.
std::vector<ClusterAssignment> cluster_windows(std::span<const WindowId> ids,
                                               const DistanceMatrix& d,
                                               const ClusterParams& params,
                                               CondensedTree* primary_tree = nullptr);

/// Re-runs HDBSCAN on the noise rows of `assignments` with the relaxed
/// parameters. Returns only the re-examined rows (pass = relaxed); points
/// already clustered are never touched.
std::vector<ClusterAssignment> recluster_noise(
    std::span<const ClusterAssignment> assignments, const DistanceMatrix& d,
    const ClusterParams& params);

}  // namespace cipher
