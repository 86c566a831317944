#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "topomap/distance_matrix.hpp"

namespace topomap {

/// One agglomeration step. Clusters 0..n-1 are the input points; merge k
/// creates cluster n + k (scipy linkage convention).
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // ascending height; fewer than n-1 when the metric is disconnected
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  /// Returns false when already joined.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Single-linkage dendrogram from a minimum spanning forest (Prim, O(n^2)).
inline Dendrogram single_linkage(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  Dendrogram out;
  out.leaves = n;
  if (n == 0) return out;

  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> forest;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInfinity);
  std::vector<std::size_t> via(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (in_tree[start]) continue;
    std::size_t u = start;
    in_tree[u] = true;
    while (true) {
      std::size_t next = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (in_tree[v]) continue;
        if (m(u, v) < best[v]) {
          best[v] = m(u, v);
          via[v] = u;
        }
        if (std::isfinite(best[v]) && (next == n || best[v] < best[next])) next = v;
      }
      if (next == n) break;
      in_tree[next] = true;
      forest.push_back({via[next], next, best[next]});
      u = next;
    }
  }

  std::stable_sort(forest.begin(), forest.end(),
                   [](const Edge& x, const Edge& y) { return x.w < y.w; });
  DisjointSets sets(n);
  std::vector<std::size_t> cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  for (const Edge& e : forest) {
    const std::size_t ra = sets.find(e.a);
    const std::size_t rb = sets.find(e.b);
    const std::size_t left = std::min(cluster_id[ra], cluster_id[rb]);
    const std::size_t right = std::max(cluster_id[ra], cluster_id[rb]);
    sets.unite(ra, rb);
    const std::size_t root = sets.find(ra);
    out.merges.push_back({left, right, e.w, sets.size_of(root)});
    cluster_id[root] = n + out.merges.size() - 1;
  }
  return out;
}

/// Flat clusters from merges with height <= cutoff. Labels are numbered in
/// order of each cluster's smallest point index.
inline std::vector<std::size_t> cut_dendrogram(const Dendrogram& d, double cutoff) {
  const std::size_t n = d.leaves;
  DisjointSets sets(2 * n);
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const Merge& mg = d.merges[k];
    if (mg.height > cutoff) break;
    sets.unite(mg.left, n + k);
    sets.unite(mg.right, n + k);
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(2 * n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (root_label[r] == n) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

inline std::size_t cluster_count(const std::vector<std::size_t>& labels) {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace topomap
