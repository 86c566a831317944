#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "topomap/distance_matrix.hpp"
#include "topomap/tda.hpp"

namespace topomap::fixtures {

/// Textbook persistence: enumerate every simplex up to dimension 2, sort,
/// build the dense Z/2 boundary matrix, reduce left to right with no
/// optimisations, and read off pairs.
inline PersistenceDiagram naive_persistence(const DistanceMatrix& m, double max_eps) {
  struct Cell {
    std::vector<int> v;
    double value;
  };
  const int n = static_cast<int>(m.size());
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) cells.push_back({{i}, 0.0});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m(i, j) <= max_eps) cells.push_back({{i, j}, m(i, j)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double v = std::max({m(i, j), m(i, k), m(j, k)});
        if (v <= max_eps) cells.push_back({{i, j, k}, v});
      }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.v.size() != b.v.size()) return a.v.size() < b.v.size();
    return a.v < b.v;
  });
  const std::size_t N = cells.size();
  std::map<std::vector<int>, std::size_t> where;
  for (std::size_t k = 0; k < N; ++k) where[cells[k].v] = k;

  std::vector<std::vector<char>> col(N, std::vector<char>(N, 0));
  for (std::size_t j = 0; j < N; ++j) {
    const auto& v = cells[j].v;
    if (v.size() < 2) continue;
    for (std::size_t drop = 0; drop < v.size(); ++drop) {
      std::vector<int> face;
      for (std::size_t q = 0; q < v.size(); ++q)
        if (q != drop) face.push_back(v[q]);
      col[j][where.at(face)] = 1;
    }
  }
  const auto low = [&](std::size_t j) {
    for (std::size_t r = N; r-- > 0;)
      if (col[j][r]) return static_cast<long>(r);
    return -1L;
  };
  for (std::size_t j = 0; j < N; ++j) {
    bool changed = true;
    while (changed) {
      changed = false;
      const long lj = low(j);
      if (lj < 0) break;
      for (std::size_t i = 0; i < j; ++i) {
        if (low(i) == lj) {
          for (std::size_t r = 0; r < N; ++r) col[j][r] ^= col[i][r];
          changed = true;
          break;
        }
      }
    }
  }
  PersistenceDiagram dgm;
  std::vector<bool> paired(N, false);
  for (std::size_t j = 0; j < N; ++j) {
    const long l = low(j);
    if (l < 0) continue;
    paired[static_cast<std::size_t>(l)] = paired[j] = true;
    const int d = static_cast<int>(cells[static_cast<std::size_t>(l)].v.size()) - 1;
    if (d <= 1 && cells[j].value > cells[static_cast<std::size_t>(l)].value) {
      dgm[d].push_back({cells[static_cast<std::size_t>(l)].value, cells[j].value});
    }
  }
  for (std::size_t j = 0; j < N; ++j) {
    const int d = static_cast<int>(cells[j].v.size()) - 1;
    if (!paired[j] && d <= 1) dgm[d].push_back({cells[j].value, std::numeric_limits<double>::infinity()});
  }
  dgm.normalize();
  return dgm;
}

/// Bottleneck distance between two single-dimension diagrams; infinite bars
/// must match infinite bars (by birth).
inline double bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  // Cost matrix of the augmented bipartite problem: a ∪ diag(b) vs b ∪ diag(a).
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  const auto diag = [inf](const PersistencePair& p) { return p.infinite() ? inf : p.lifetime() / 2.0; };
  const auto pair_cost = [&](const PersistencePair& p, const PersistencePair& q) {
    if (p.infinite() != q.infinite()) return inf;
    const double db = std::abs(p.birth - q.birth);
    return p.infinite() ? db : std::max(db, std::abs(p.death - q.death));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i < na && j < nb) cost[i][j] = pair_cost(a[i], b[j]);
      else if (i < na) cost[i][j] = j - nb == i ? diag(a[i]) : inf;
      else if (j < nb) cost[i][j] = i - na == j ? diag(b[j]) : inf;
      else cost[i][j] = 0.0;
    }
  }
  std::vector<double> candidates{0.0};
  for (const auto& r : cost)
    for (double c : r)
      if (std::isfinite(c)) candidates.push_back(c);
  std::sort(candidates.begin(), candidates.end());
  for (double eps : candidates) {
    std::vector<long> match(n, -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t i, std::vector<bool>& seen) {
      for (std::size_t j = 0; j < n; ++j) {
        if (cost[i][j] > eps || seen[j]) continue;
        seen[j] = true;
        if (match[j] < 0 || augment(static_cast<std::size_t>(match[j]), seen)) {
          match[j] = static_cast<long>(i);
          return true;
        }
      }
      return false;
    };
    std::size_t size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<bool> seen(n, false);
      if (augment(i, seen)) ++size;
    }
    if (size == n) return eps;
  }
  return inf;
}

}  // namespace topomap::fixtures
