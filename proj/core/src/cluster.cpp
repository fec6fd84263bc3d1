#include "cipher/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "cipher/error.hpp"

namespace cipher {

std::string_view to_string(Metric m) {
  return m == Metric::kEuclidean ? "euclidean" : "mindist";
}

Metric parse_metric(std::string_view text) {
  if (text == "euclidean") return Metric::kEuclidean;
  if (text == "mindist") return Metric::kMindist;
  throw ConfigError("unknown metric '" + std::string(text) +
                    "' (expected euclidean or mindist)");
}

std::string_view to_string(Pass p) {
  return p == Pass::kPrimary ? "primary" : "relaxed";
}

Pass parse_pass(std::string_view text) {
  if (text == "primary") return Pass::kPrimary;
  if (text == "relaxed") return Pass::kRelaxed;
  throw InvalidArgument("unknown pass '" + std::string(text) + "'");
}

void ClusterParams::validate() const {
  if (min_cluster_size < 2) throw ConfigError("cluster.min_cluster_size must be >= 2");
  if (min_samples < 1) throw ConfigError("cluster.min_samples must be >= 1");
  if (!(relax_factor > 0.0 && relax_factor <= 1.0)) {
    throw ConfigError("cluster.relax_factor must be in (0, 1]");
  }
}

ClusterParams ClusterParams::relaxed() const {
  ClusterParams r = *this;
  const auto scale = [this](std::size_t v) {
    return static_cast<std::size_t>(std::floor(relax_factor * static_cast<double>(v)));
  };
  r.min_cluster_size = std::max<std::size_t>(2, scale(min_cluster_size));
  r.min_samples = std::max<std::size_t>(1, scale(min_samples));
  r.recluster_noise = false;
  return r;
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix DistanceMatrix::euclidean(std::vector<std::vector<double>> points) {
  DistanceMatrix d;
  d.kind_ = Kind::kEuclidean;
  d.n_ = points.size();
  for (const auto& p : points) {
    if (p.size() != points.front().size()) {
      throw InvalidArgument("points have differing dimensions");
    }
  }
  d.points_ = std::move(points);
  return d;
}

DistanceMatrix DistanceMatrix::mindist(std::vector<IsaxWord> words,
                                       std::size_t original_length) {
  DistanceMatrix d;
  d.kind_ = Kind::kMindist;
  d.n_ = words.size();
  d.words_ = std::move(words);
  d.original_length_ = original_length;
  return d;
}

DistanceMatrix DistanceMatrix::from_condensed(std::size_t n, std::vector<double> values) {
  if (values.size() != n * (n - (n > 0 ? 1 : 0)) / 2) {
    throw InvalidArgument("condensed matrix has the wrong number of entries");
  }
  DistanceMatrix d;
  d.kind_ = Kind::kCondensed;
  d.n_ = n;
  d.condensed_ = std::move(values);
  return d;
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  switch (kind_) {
    case Kind::kEuclidean: {
      const auto& a = points_[i];
      const auto& b = points_[j];
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      return std::sqrt(s);
    }
    case Kind::kMindist:
      return cipher::mindist(words_[i], words_[j], original_length_);
    case Kind::kCondensed:
      return condensed_[i * n_ - i * (i + 1) / 2 + (j - i - 1)];
  }
  return 0.0;
}

DistanceMatrix DistanceMatrix::subset(std::span<const std::size_t> keep) const {
  DistanceMatrix d;
  d.kind_ = kind_;
  d.n_ = keep.size();
  d.original_length_ = original_length_;
  switch (kind_) {
    case Kind::kEuclidean:
      for (auto k : keep) d.points_.push_back(points_.at(k));
      break;
    case Kind::kMindist:
      for (auto k : keep) d.words_.push_back(words_.at(k));
      break;
    case Kind::kCondensed:
      for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = a + 1; b < keep.size(); ++b) {
          d.condensed_.push_back((*this)(keep[a], keep[b]));
        }
      }
      break;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Core distances and MST

std::vector<double> core_distances(const DistanceMatrix& d, std::size_t min_samples) {
  const std::size_t n = d.size();
  if (min_samples == 0) throw InvalidArgument("min_samples must be >= 1");
  if (n < min_samples) {
    throw InvalidArgument("need at least min_samples=" + std::to_string(min_samples) +
                          " points, got " + std::to_string(n));
  }
  std::vector<double> core(n, 0.0);
  if (min_samples == 1) return core;
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = d(i, j);
    // row includes the self distance 0, which is the first neighbour.
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_samples - 1),
                     row.end());
    core[i] = row[min_samples - 1];
  }
  return core;
}

std::vector<MstEdge> mst(const DistanceMatrix& d, std::span<const double> core) {
  const std::size_t n = d.size();
  if (n < 2) throw InvalidArgument("mst needs at least two points");
  if (core.size() != n) throw InvalidArgument("core distance count mismatch");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(n, inf);
  std::vector<std::size_t> from(n, 0);
  std::vector<char> in_tree(n, 0);
  std::vector<MstEdge> edges;
  edges.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = mutual_reachability(d(current, v), core[current], core[v]);
      if (w < key[v]) {
        key[v] = w;
        from[v] = current;
      }
      if (best == n || key[v] < key[best]) best = v;
    }
    in_tree[best] = 1;
    edges.push_back(MstEdge{std::min(from[best], best), std::max(from[best], best), key[best]});
    current = best;
  }
  return edges;
}

double lambda_of(double distance) {
  if (!(distance > 1.0 / kLambdaCap)) return kLambdaCap;
  return 1.0 / distance;
}

// ---------------------------------------------------------------------------
// Condensed tree

namespace {

struct DendroNode {
  double weight = 0.0;
  std::size_t size = 1;
  std::size_t min_point = 0;
  std::vector<std::size_t> children;  // dendrogram node ids, sorted by min_point
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Single-linkage dendrogram where every group of equal-weight edges forms one
// level, so a component may merge more than two parts at once.
std::vector<DendroNode> build_dendrogram(std::size_t n, std::span<const MstEdge> edges) {
  std::vector<DendroNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].min_point = i;

  std::vector<MstEdge> sorted(edges.begin(), edges.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MstEdge& x, const MstEdge& y) { return x.weight < y.weight; });

  DisjointSets sets(n);
  std::vector<std::size_t> node_of(n);  // set representative -> dendrogram node
  std::iota(node_of.begin(), node_of.end(), std::size_t{0});

  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].weight == sorted[i].weight) ++j;

    // Dendrogram nodes as they stood before this level.
    std::vector<std::pair<std::size_t, std::size_t>> before;  // (point, node)
    for (std::size_t k = i; k < j; ++k) {
      before.emplace_back(sorted[k].a, node_of[sets.find(sorted[k].a)]);
      before.emplace_back(sorted[k].b, node_of[sets.find(sorted[k].b)]);
    }
    for (std::size_t k = i; k < j; ++k) sets.unite(sorted[k].a, sorted[k].b);

    std::vector<std::pair<std::size_t, std::size_t>> grouped;  // (new root, old node)
    for (const auto& [point, node] : before) grouped.emplace_back(sets.find(point), node);
    std::sort(grouped.begin(), grouped.end());
    grouped.erase(std::unique(grouped.begin(), grouped.end()), grouped.end());

    std::size_t g = 0;
    while (g < grouped.size()) {
      std::size_t h = g;
      DendroNode merged;
      merged.weight = sorted[i].weight;
      merged.size = 0;
      merged.min_point = std::numeric_limits<std::size_t>::max();
      while (h < grouped.size() && grouped[h].first == grouped[g].first) {
        const std::size_t child = grouped[h].second;
        merged.children.push_back(child);
        merged.size += nodes[child].size;
        merged.min_point = std::min(merged.min_point, nodes[child].min_point);
        ++h;
      }
      std::sort(merged.children.begin(), merged.children.end(),
                [&](std::size_t x, std::size_t y) {
                  return nodes[x].min_point < nodes[y].min_point;
                });
      node_of[grouped[g].first] = nodes.size();
      nodes.push_back(std::move(merged));
      g = h;
    }
    i = j;
  }
  return nodes;
}

void collect_points(const std::vector<DendroNode>& nodes, std::size_t id, std::size_t n,
                    std::vector<std::size_t>& out) {
  if (id < n) {
    out.push_back(id);
    return;
  }
  for (auto c : nodes[id].children) collect_points(nodes, c, n, out);
}

}  // namespace

CondensedTree condense(std::size_t n_points, std::span<const MstEdge> edges,
                       std::size_t min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n_points;
  tree.min_cluster_size = min_cluster_size;
  if (n_points == 0) return tree;
  if (edges.size() + 1 != n_points) {
    throw InvalidArgument("condense expects n-1 spanning tree edges");
  }
  if (n_points == 1) {
    tree.records.push_back({n_points, 0, kLambdaCap, 1});
    return tree;
  }
  const auto nodes = build_dendrogram(n_points, edges);
  std::size_t next_cluster = n_points + 1;

  auto fall_out = [&](std::size_t cluster, std::size_t dendro, double lambda) {
    std::vector<std::size_t> pts;
    collect_points(nodes, dendro, n_points, pts);
    std::sort(pts.begin(), pts.end());
    for (auto p : pts) tree.records.push_back({cluster, p, lambda, 1});
  };

  // (dendrogram node, cluster it belongs to), processed depth first so child
  // cluster ids are always larger than their parent's.
  auto visit = [&](auto&& self, std::size_t dendro, std::size_t cluster) -> void {
    std::size_t node = dendro;
    while (true) {
      const DendroNode& dn = nodes[node];
      const double lambda = lambda_of(dn.weight);
      std::vector<std::size_t> large;
      for (auto c : dn.children) {
        if (nodes[c].size >= min_cluster_size) large.push_back(c);
      }
      if (large.size() >= 2) {
        std::vector<std::pair<std::size_t, std::size_t>> spawned;
        for (auto c : dn.children) {
          if (nodes[c].size >= min_cluster_size) {
            const std::size_t id = next_cluster++;
            tree.records.push_back({cluster, id, lambda, nodes[c].size});
            spawned.emplace_back(c, id);
          } else {
            fall_out(cluster, c, lambda);
          }
        }
        for (const auto& [c, id] : spawned) self(self, c, id);
        return;
      }
      for (auto c : dn.children) {
        if (large.empty() || c != large.front()) fall_out(cluster, c, lambda);
      }
      if (large.empty()) return;
      node = large.front();
    }
  };
  visit(visit, nodes.size() - 1, n_points);
  return tree;
}

std::string CondensedTree::to_json() const {
  std::ostringstream out;
  out << "{\"schema_version\":1,\"n_points\":" << n_points
      << ",\"min_cluster_size\":" << min_cluster_size << ",\"records\":[";
  char buf[64];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::snprintf(buf, sizeof buf, "%.17g", r.lambda);
    out << (i ? "," : "") << "{\"parent\":" << r.parent << ",\"child\":" << r.child
        << ",\"lambda\":" << buf << ",\"child_size\":" << r.child_size << "}";
  }
  out << "]}";
  return out.str();
}

// ---------------------------------------------------------------------------
// Extraction

Extraction extract(const CondensedTree& tree, bool allow_single_cluster) {
  const std::size_t n = tree.n_points;
  Extraction ex;
  ex.labels.assign(n, kNoise);
  ex.strengths.assign(n, 0.0);
  if (n == 0) return ex;

  std::size_t n_clusters = 1;
  for (const auto& r : tree.records) {
    if (tree.is_cluster(r.child)) n_clusters = std::max(n_clusters, r.child - n + 1);
  }
  std::vector<double> birth(n_clusters, 0.0);
  std::vector<std::vector<std::size_t>> kids(n_clusters);
  std::vector<double> point_lambda(n, 0.0);
  std::vector<std::size_t> point_parent(n, tree.root());
  for (const auto& r : tree.records) {
    if (tree.is_cluster(r.child)) {
      birth[r.child - n] = r.lambda;
      kids[r.parent - n].push_back(r.child - n);
    } else {
      point_lambda[r.child] = r.lambda;
      point_parent[r.child] = r.parent;
    }
  }

  ex.stability.assign(n_clusters, 0.0);
  for (const auto& r : tree.records) {
    const std::size_t c = r.parent - n;
    ex.stability[c] += (r.lambda - birth[c]) * static_cast<double>(r.child_size);
  }

  // Children always carry larger ids than parents, so a reverse sweep sees
  // every subtree before its root.
  std::vector<double> value(n_clusters, 0.0);
  std::vector<char> chosen(n_clusters, 0);
  const bool root_eligible =
      allow_single_cluster && n >= std::max<std::size_t>(2, tree.min_cluster_size);
  for (std::size_t c = n_clusters; c-- > 0;) {
    double subtree = 0.0;
    for (auto k : kids[c]) subtree += value[k];
    const double own = ex.stability[c];
    const bool children_win =
        !kids[c].empty() &&
        subtree > own + 1e-12 * std::max(std::abs(own), std::abs(subtree));
    if ((c != 0 || root_eligible) && !children_win) {
      chosen[c] = 1;
      value[c] = own;
    } else {
      value[c] = subtree;
    }
  }

  // Top-down: a chosen cluster claims its whole subtree.
  std::vector<int> owner(n_clusters, -1);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (owner[c] == -1 && chosen[c]) owner[c] = static_cast<int>(c);
    for (auto k : kids[c]) owner[k] = owner[c];
  }
  std::vector<std::size_t> selected;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (chosen[c] && owner[c] == static_cast<int>(c)) selected.push_back(c);
  }

  std::vector<std::size_t> min_point(n_clusters, n);
  std::vector<double> max_lambda(n_clusters, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const int o = owner[point_parent[p] - n];
    if (o < 0) continue;
    min_point[o] = std::min(min_point[o], p);
    max_lambda[o] = std::max(max_lambda[o], point_lambda[p]);
  }
  std::sort(selected.begin(), selected.end(),
            [&](std::size_t a, std::size_t b) { return min_point[a] < min_point[b]; });
  std::vector<int> dense(n_clusters, kNoise);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    dense[selected[i]] = static_cast<int>(i);
    ex.selected.push_back(selected[i] + n);
  }
  for (std::size_t p = 0; p < n; ++p) {
    const int o = owner[point_parent[p] - n];
    if (o < 0) continue;
    ex.labels[p] = dense[o];
    ex.strengths[p] = max_lambda[o] > 0.0 ? point_lambda[p] / max_lambda[o] : 1.0;
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Drivers

ClusteringResult hdbscan(const DistanceMatrix& d, const ClusterParams& params) {
  params.validate();
  const std::size_t n = d.size();
  ClusteringResult result;
  result.labels.assign(n, kNoise);
  result.strengths.assign(n, 0.0);
  result.tree.n_points = n;
  result.tree.min_cluster_size = params.min_cluster_size;
  if (n < std::max<std::size_t>({2, params.min_samples, params.min_cluster_size})) {
    return result;
  }
  const auto core = core_distances(d, params.min_samples);
  const auto edges = mst(d, core);
  result.tree = condense(n, edges, params.min_cluster_size);
  auto ex = extract(result.tree, params.allow_single_cluster);
  result.labels = std::move(ex.labels);
  result.strengths = std::move(ex.strengths);
  return result;
}

std::vector<ClusterAssignment> recluster_noise(
    std::span<const ClusterAssignment> assignments, const DistanceMatrix& d,
    const ClusterParams& params) {
  if (assignments.size() != d.size()) {
    throw InvalidArgument("assignment count does not match the distance matrix");
  }
  std::vector<std::size_t> rows;
  int next_id = 0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i].cluster == kNoise) {
      rows.push_back(i);
    } else {
      next_id = std::max(next_id, assignments[i].cluster + 1);
    }
  }
  std::vector<ClusterAssignment> out;
  out.reserve(rows.size());
  if (rows.empty()) return out;

  const auto relaxed = params.relaxed();
  const auto sub = hdbscan(d.subset(rows), relaxed);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ClusterAssignment a = assignments[rows[k]];
    a.pass = Pass::kRelaxed;
    a.cluster = sub.labels[k] == kNoise ? kNoise : next_id + sub.labels[k];
    a.membership_strength = sub.labels[k] == kNoise ? 0.0 : sub.strengths[k];
    out.push_back(a);
  }
  return out;
}

std::vector<ClusterAssignment> cluster_windows(std::span<const WindowId> ids,
                                               const DistanceMatrix& d,
                                               const ClusterParams& params,
                                               CondensedTree* primary_tree) {
  if (ids.size() != d.size()) {
    throw InvalidArgument("window id count does not match the distance matrix");
  }
  auto primary = hdbscan(d, params);
  std::vector<ClusterAssignment> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = ClusterAssignment{ids[i], primary.labels[i], Pass::kPrimary,
                               primary.strengths[i]};
  }
  if (primary_tree) *primary_tree = std::move(primary.tree);
  if (!params.recluster_noise) return out;

  const auto relaxed = recluster_noise(out, d, params);
  std::size_t k = 0;
  for (auto& a : out) {
    if (a.cluster == kNoise) a = relaxed[k++];
  }
  return out;
}

}  // namespace cipher
