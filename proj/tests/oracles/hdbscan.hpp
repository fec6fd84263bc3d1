#pragma once

// Brute-force HDBSCAN reference. No MST and no dendrogram: the hierarchy is
// found by sweeping every distinct mutual-reachability value from the top
// and recomputing connected components of each live cluster under the edges
// strictly below that value. Excess-of-mass selection runs on the clusters
// discovered this way.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "graph.hpp"

namespace oracle {

struct HdbscanParams {
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 5;
  bool allow_single_cluster = false;
};

inline double to_lambda(double d) {
  constexpr double cap = 1e12;
  return d > 1.0 / cap ? 1.0 / d : cap;
}

/// `dist` is a full symmetric matrix.
inline std::vector<int> hdbscan(const std::vector<std::vector<double>>& dist,
                                const HdbscanParams& p) {
  const std::size_t n = dist.size();
  std::vector<int> labels(n, -1);
  if (n < std::max<std::size_t>({2, p.min_samples, p.min_cluster_size})) return labels;

  std::vector<double> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = dist[i];
    std::sort(row.begin(), row.end());
    core[i] = row[p.min_samples - 1];
  }
  std::vector<std::vector<double>> mr(n, std::vector<double>(n, 0.0));
  std::set<double> levels;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      mr[i][j] = std::max({dist[i][j], core[i], core[j]});
      levels.insert(mr[i][j]);
    }
  }

  struct Cluster {
    std::vector<std::size_t> initial;
    std::vector<std::size_t> live;
    double birth = 0.0;
    double stability = 0.0;
    std::vector<std::size_t> children;
    bool alive = true;
  };
  std::vector<Cluster> clusters(1);
  clusters[0].initial.resize(n);
  for (std::size_t i = 0; i < n; ++i) clusters[0].initial[i] = i;
  clusters[0].live = clusters[0].initial;

  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    const double w = *it;
    const double lambda = to_lambda(w);
    const std::size_t count = clusters.size();
    for (std::size_t c = 0; c < count; ++c) {
      if (!clusters[c].alive) continue;
      const auto members = clusters[c].live;
      UnionFind uf(n);
      for (auto a : members) {
        for (auto b : members) {
          if (a < b && mr[a][b] < w) uf.unite(a, b);
        }
      }
      std::vector<std::vector<std::size_t>> parts;
      std::vector<std::size_t> root_of;
      for (auto a : members) {
        const auto r = uf.find(a);
        const auto pos = std::find(root_of.begin(), root_of.end(), r);
        if (pos == root_of.end()) {
          root_of.push_back(r);
          parts.push_back({a});
        } else {
          parts[static_cast<std::size_t>(pos - root_of.begin())].push_back(a);
        }
      }
      if (parts.size() == 1) continue;

      std::vector<std::size_t> large;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].size() >= p.min_cluster_size) large.push_back(k);
      }
      const double gain = lambda - clusters[c].birth;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const bool is_large = std::find(large.begin(), large.end(), k) != large.end();
        if (!is_large || large.size() >= 2) {
          clusters[c].stability += gain * static_cast<double>(parts[k].size());
        }
      }
      if (large.size() >= 2) {
        clusters[c].alive = false;
        for (auto k : large) {
          Cluster child;
          child.initial = parts[k];
          child.live = parts[k];
          child.birth = lambda;
          clusters[c].children.push_back(clusters.size());
          clusters.push_back(std::move(child));
        }
      } else if (large.size() == 1) {
        clusters[c].live = parts[large.front()];
      } else {
        clusters[c].alive = false;
        clusters[c].live.clear();
      }
    }
  }

  // Excess of mass, leaves first (children always come after parents).
  const std::size_t m = clusters.size();
  std::vector<double> best(m, 0.0);
  std::vector<char> pick(m, 0);
  for (std::size_t c = m; c-- > 0;) {
    double below = 0.0;
    for (auto k : clusters[c].children) below += best[k];
    const double own = clusters[c].stability;
    const double scale = std::max(std::abs(own), std::abs(below));
    const bool descendants_better = !clusters[c].children.empty() && below - own > 1e-12 * scale;
    const bool eligible = c != 0 || p.allow_single_cluster;
    if (eligible && !descendants_better) {
      pick[c] = 1;
      best[c] = own;
    } else {
      best[c] = below;
    }
  }
  // A picked ancestor wins over anything picked beneath it.
  std::vector<char> blocked(m, 0);
  int next = 0;
  for (std::size_t c = 0; c < m; ++c) {
    if (blocked[c]) {
      for (auto k : clusters[c].children) blocked[k] = 1;
      continue;
    }
    if (pick[c]) {
      for (auto i : clusters[c].initial) labels[i] = next;
      ++next;
      for (auto k : clusters[c].children) blocked[k] = 1;
    }
  }
  return labels;
}

inline std::vector<std::vector<double>> euclidean_matrix(
    const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        const double t = pts[i][k] - pts[j][k];
        s += t * t;
      }
      d[i][j] = d[j][i] = std::sqrt(s);
    }
  }
  return d;
}

}  // namespace oracle
