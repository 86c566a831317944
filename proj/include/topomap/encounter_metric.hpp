#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "topomap/distance_matrix.hpp"
#include "topomap/scenario.hpp"
#include "topomap/swarm.hpp"

namespace topomap {

/// Edge weights live on a 2^-20 s grid, so path sums are exact in double
/// precision and shortest-path distances are exactly symmetric and obey the
/// triangle inequality.
inline double snap_weight(double w) {
  constexpr double kScale = 1048576.0;
  return std::round(w * kScale) / kScale;
}

/// inf |t_a - t_b| over t_a in a, t_b in b; zero when the intervals overlap.
inline double interval_gap(const Interval& a, const Interval& b) {
  return std::max({0.0, b.begin - a.end, a.begin - b.end});
}

namespace detail {

inline std::vector<int> shared_ids(const EncounterEvent& x, const EncounterEvent& y) {
  std::vector<int> out;
  for (int id : {x.id_a, x.id_b}) {
    if (y.involves(id)) out.push_back(id);
  }
  return out;
}

inline bool static_zero(const EncounterEvent& x, const EncounterEvent& y, int s,
                        const StaticIntervalLog& log, StaticZeroing mode) {
  if (mode == StaticZeroing::None) return false;
  const auto it = log.find(s);
  if (it == log.end()) return false;
  for (const Interval& k : it->second) {
    if (mode == StaticZeroing::Strict) {
      const double lo = std::max({x.t0, y.t0, k.begin});
      const double hi = std::min({x.t1, y.t1, k.end});
      if (lo <= hi) return true;
    } else if (x.interval().intersects(k) && y.interval().intersects(k)) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Literal edge rule between two events: nullopt when they share no agent.
inline std::optional<double> edge_weight(const EncounterEvent& x, const EncounterEvent& y,
                                         const StaticIntervalLog& static_log,
                                         StaticZeroing mode) {
  const auto shared = detail::shared_ids(x, y);
  if (shared.empty()) return std::nullopt;
  for (int s : shared) {
    if (detail::static_zero(x, y, s, static_log, mode)) return 0.0;
  }
  return snap_weight(interval_gap(x.interval(), y.interval()));
}

struct WeightedEdge {
  std::size_t to = 0;
  double weight = 0.0;
};

/// Undirected weighted graph whose vertices are encounter events.
struct EncounterGraph {
  std::vector<std::size_t> events;  // vertex -> event index
  std::vector<std::vector<WeightedEdge>> adjacency;

  [[nodiscard]] std::size_t vertex_count() const { return adjacency.size(); }
  [[nodiscard]] std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adjacency) twice += a.size();
    return twice / 2;
  }
  void add_edge(std::size_t u, std::size_t v, double w) {
    adjacency[u].push_back({v, w});
    adjacency[v].push_back({u, w});
  }
};

namespace detail {

struct TimedVertex {
  Interval interval;
  std::size_t vertex = 0;
};

/// Links each interval (in start order) to the earlier interval reaching
/// furthest in time. The resulting forest has the same path distances as the
/// complete gap-weighted graph on these intervals. With `zero_only`, only
/// the zero-gap links are kept (overlap connectivity).
inline void link_intervals(EncounterGraph& g, std::vector<TimedVertex> items, bool zero_only) {
  std::sort(items.begin(), items.end(), [](const TimedVertex& a, const TimedVertex& b) {
    return std::tie(a.interval.begin, a.interval.end, a.vertex) <
           std::tie(b.interval.begin, b.interval.end, b.vertex);
  });
  for (std::size_t k = 1, reach = 0; k < items.size(); ++k) {
    const double w = snap_weight(std::max(0.0, items[k].interval.begin - items[reach].interval.end));
    if (!zero_only || w == 0.0) g.add_edge(items[reach].vertex, items[k].vertex, w);
    if (items[k].interval.end > items[reach].interval.end) reach = k;
  }
}

inline void link_zero_chain(EncounterGraph& g, std::span<const std::size_t> vertices) {
  for (std::size_t k = 1; k < vertices.size(); ++k) g.add_edge(vertices[k - 1], vertices[k], 0.0);
}

}  // namespace detail

/// Sparse encounter graph with the same shortest-path metric as the literal
/// all-pairs rule (see build_complete_graph).
inline EncounterGraph build_graph(std::span<const EncounterEvent> events,
                                  const StaticIntervalLog& static_log, StaticZeroing mode) {
  if (events.empty()) throw std::invalid_argument("build_graph: empty event list");
  EncounterGraph g;
  g.adjacency.resize(events.size());
  std::map<int, std::vector<std::size_t>> by_agent;
  for (std::size_t v = 0; v < events.size(); ++v) {
    g.events.push_back(events[v].index);
    by_agent[events[v].id_a].push_back(v);
    by_agent[events[v].id_b].push_back(v);
  }

  for (const auto& [agent, vertices] : by_agent) {
    std::vector<detail::TimedVertex> items;
    for (std::size_t v : vertices) items.push_back({events[v].interval(), v});
    detail::link_intervals(g, items, false);

    if (mode == StaticZeroing::None) continue;
    const auto it = static_log.find(agent);
    if (it == static_log.end()) continue;
    for (const Interval& k : it->second) {
      if (mode == StaticZeroing::SameStaticInterval) {
        std::vector<std::size_t> group;
        for (std::size_t v : vertices) {
          if (events[v].interval().intersects(k)) group.push_back(v);
        }
        detail::link_zero_chain(g, group);
      } else {
        // Strict: events whose intervals, clipped to T^k, still overlap.
        std::vector<detail::TimedVertex> clipped;
        for (std::size_t v : vertices) {
          const Interval e = events[v].interval();
          if (!e.intersects(k)) continue;
          clipped.push_back({{std::max(e.begin, k.begin), std::min(e.end, k.end)}, v});
        }
        detail::link_intervals(g, clipped, true);
      }
    }
  }
  return g;
}

/// Literal rule applied to every event pair; O(n^2) edges. Reference only.
inline EncounterGraph build_complete_graph(std::span<const EncounterEvent> events,
                                           const StaticIntervalLog& static_log,
                                           StaticZeroing mode) {
  if (events.empty()) throw std::invalid_argument("build_complete_graph: empty event list");
  EncounterGraph g;
  g.adjacency.resize(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    g.events.push_back(events[i].index);
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (auto w = edge_weight(events[i], events[j], static_log, mode)) g.add_edge(i, j, *w);
    }
  }
  return g;
}

/// Single-source Dijkstra; +inf for unreachable vertices.
inline std::vector<double> dijkstra(const EncounterGraph& g, std::size_t source) {
  std::vector<double> dist(g.vertex_count(), kInfinity);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const WeightedEdge& e : g.adjacency[u]) {
      const double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return dist;
}

/// All-pairs shortest paths, one Dijkstra per source.
inline DistanceMatrix shortest_paths(const EncounterGraph& g) {
  DistanceMatrix m(g.vertex_count());
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    const auto d = dijkstra(g, s);
    std::copy(d.begin(), d.end(), m.row(s).begin());
  }
  return m;
}

/// Vertex sets of connected components, each sorted, ordered by smallest vertex.
inline std::vector<std::vector<std::size_t>> graph_components(const EncounterGraph& g) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = true;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (const WeightedEdge& e : g.adjacency[comp[head]]) {
        if (!seen[e.to]) {
          seen[e.to] = true;
          comp.push_back(e.to);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Induced subgraph on `vertices` (renumbered in the given order).
inline EncounterGraph induced_subgraph(const EncounterGraph& g,
                                       std::span<const std::size_t> vertices) {
  std::vector<std::size_t> local(g.vertex_count(), kUnreachable);
  for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = k;
  EncounterGraph sub;
  sub.adjacency.resize(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    sub.events.push_back(g.events[vertices[k]]);
    for (const WeightedEdge& e : g.adjacency[vertices[k]]) {
      if (local[e.to] != kUnreachable) sub.adjacency[k].push_back({local[e.to], e.weight});
    }
  }
  return sub;
}

// ---------------------------------------------------------------------------
// Subsampling.

struct SubsampleOptions {
  double density_quantile = 0.1;    // fraction of lowest-density points discarded
  double density_percentile = 0.05; // density radius = this percentile of positive distances
};

/// Greedy farthest-point order over `candidates`. Element k of `radii` is the
/// covering radius (max over unpicked of distance to the picked set) after
/// k + 1 picks. The first pick is the candidate with the largest eccentricity.
struct FarthestPointOrder {
  std::vector<std::size_t> order;
  std::vector<double> radii;
};

inline FarthestPointOrder farthest_point_order(const DistanceMatrix& m,
                                               std::span<const std::size_t> candidates,
                                               std::size_t count) {
  FarthestPointOrder out;
  if (candidates.empty() || count == 0) return out;
  count = std::min(count, candidates.size());

  std::size_t first = candidates.front();
  double best_ecc = -1.0;
  for (std::size_t c : candidates) {
    double ecc = 0.0;
    for (std::size_t o : candidates) ecc = std::max(ecc, m(c, o));
    if (ecc > best_ecc) {
      best_ecc = ecc;
      first = c;
    }
  }

  std::vector<double> nearest(candidates.size(), kInfinity);
  std::vector<bool> picked(candidates.size(), false);
  std::size_t pick_slot =
      static_cast<std::size_t>(std::find(candidates.begin(), candidates.end(), first) - candidates.begin());
  while (true) {
    picked[pick_slot] = true;
    out.order.push_back(candidates[pick_slot]);
    double radius = 0.0;
    std::size_t far_slot = candidates.size();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (picked[k]) continue;
      nearest[k] = std::min(nearest[k], m(candidates[k], candidates[pick_slot]));
      if (far_slot == candidates.size() || nearest[k] > radius) {
        radius = nearest[k];
        far_slot = k;
      }
    }
    out.radii.push_back(radius);
    if (out.order.size() == count || far_slot == candidates.size()) break;
    pick_slot = far_slot;
  }
  return out;
}

/// Per-point neighbor counts within `radius` (self excluded).
inline std::vector<std::size_t> neighbor_density(const DistanceMatrix& m, double radius) {
  std::vector<std::size_t> density(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i != j && m(i, j) <= radius) ++density[i];
    }
  }
  return density;
}

inline double positive_distance_percentile(const DistanceMatrix& m, double fraction) {
  std::vector<double> values;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double d = m(i, j);
      if (d > 0.0 && std::isfinite(d)) values.push_back(d);
    }
  }
  if (values.empty()) return 0.0;
  const auto k = std::min(values.size() - 1,
                          static_cast<std::size_t>(fraction * static_cast<double>(values.size())));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

/// Density-filtered farthest-point subsample. Returns sorted indices.
inline std::vector<std::size_t> subsample(const DistanceMatrix& m, std::size_t target_count,
                                          const SubsampleOptions& options = {}) {
  if (target_count == 0) throw std::invalid_argument("subsample: target_count must be positive");
  if (target_count > m.size()) throw std::invalid_argument("subsample: target_count exceeds point count");

  std::vector<std::size_t> survivors(m.size());
  std::iota(survivors.begin(), survivors.end(), 0);
  if (options.density_quantile > 0.0 && m.size() > 1) {
    const double rho = positive_distance_percentile(m, options.density_percentile);
    const auto density = neighbor_density(m, rho);
    std::vector<std::size_t> by_density = survivors;
    std::stable_sort(by_density.begin(), by_density.end(),
                     [&](std::size_t a, std::size_t b) { return density[a] < density[b]; });
    const auto drop = static_cast<std::size_t>(options.density_quantile * static_cast<double>(m.size()));
    survivors.assign(by_density.begin() + static_cast<std::ptrdiff_t>(drop), by_density.end());
    std::sort(survivors.begin(), survivors.end());
  }
  if (target_count >= survivors.size()) return survivors;

  auto picked = farthest_point_order(m, survivors, target_count).order;
  std::sort(picked.begin(), picked.end());
  return picked;
}

// ---------------------------------------------------------------------------
// Classical MDS.

struct EmbeddedPointCloud {
  Eigen::MatrixXd coordinates;       // one row per point
  std::vector<std::size_t> events;   // originating event index per row
  double stress = 0.0;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(coordinates.rows()); }
};

/// Normalized distance discrepancy sqrt(sum (d - d_hat)^2 / sum d^2).
inline double embedding_stress(const DistanceMatrix& m, const Eigen::MatrixXd& x) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double fitted = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm();
      num += (m(i, j) - fitted) * (m(i, j) - fitted);
      den += m(i, j) * m(i, j);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

/// Double-centered squared distances, top-`dim` eigenpairs, negative
/// eigenvalues clamped to zero.
inline EmbeddedPointCloud mds_embed(const DistanceMatrix& m, int dim = 3) {
  if (!m.all_finite()) throw std::invalid_argument("mds_embed: metric has unreachable pairs");
  const auto n = static_cast<Eigen::Index>(m.size());
  EmbeddedPointCloud cloud;
  cloud.coordinates = Eigen::MatrixXd::Zero(n, dim);
  if (n == 0) return cloud;

  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      sq(i, j) = d * d;
    }
  }
  const Eigen::VectorXd row_mean = sq.rowwise().mean();
  const Eigen::VectorXd col_mean = sq.colwise().mean().transpose();
  const double grand = sq.mean();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  // Eigenvalues come back ascending.
  for (int k = 0; k < dim && k < n; ++k) {
    const Eigen::Index col = n - 1 - k;
    const double lambda = std::max(0.0, solver.eigenvalues()(col));
    cloud.coordinates.col(k) = solver.eigenvectors().col(col) * std::sqrt(lambda);
  }
  cloud.stress = embedding_stress(m, cloud.coordinates);
  return cloud;
}

}  // namespace topomap
