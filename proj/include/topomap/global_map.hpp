#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "topomap/encounter_metric.hpp"
#include "topomap/scenario.hpp"
#include "topomap/single_linkage.hpp"
#include "topomap/swarm.hpp"
#include "topomap/tda.hpp"

namespace topomap {

/// Positions (into `events`) of events whose interval meets W_i.
inline std::vector<std::size_t> window_events(std::span<const EncounterEvent> events,
                                              std::size_t i, const WindowGrid& grid) {
  const Interval w = grid.window(i);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].interval().intersects(w)) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local maps.

/// One connected component of a window's encounter graph, mapped on its own.
struct LocalComponent {
  std::vector<std::size_t> events;         // event positions, ascending
  std::vector<std::size_t> sample;         // positions into `events`
  EmbeddedPointCloud cloud;                // embedding of the sample
  PersistenceDiagram diagram;
  FeatureReport features;
  double max_epsilon = 0.0;
  std::vector<std::size_t> sample_labels;  // robust sub-component per sample point
  std::size_t label_offset = 0;            // first map-wide component label used here
};

struct LocalMap {
  std::size_t index = 0;
  Interval window;
  std::vector<std::size_t> events;
  bool degenerate = true;
  std::size_t dropped_events = 0;  // in components below min_component_size
  std::vector<LocalComponent> components;
  FeatureReport features;
  std::size_t component_count = 0;
  std::map<std::size_t, std::size_t> label_of_event;  // event position -> component label
};

namespace detail {

inline SubsampleOptions subsample_options(const MappingParams& p) {
  return {p.density_quantile, p.density_percentile};
}

inline LocalComponent map_component(const DistanceMatrix& metric, std::vector<std::size_t> events,
                                    const MappingParams& params) {
  LocalComponent c;
  c.events = std::move(events);
  const std::size_t target = std::min(params.subsample_size, metric.size());
  c.sample = subsample(metric, target, subsample_options(params));
  const DistanceMatrix sampled = metric.restrict(c.sample);
  c.max_epsilon = params.max_epsilon_factor * sampled.diameter();
  c.diagram = persistence(rips_filtration(sampled, c.max_epsilon));
  c.features = classify(c.diagram, params.persistence_threshold * c.max_epsilon);
  c.cloud = mds_embed(sampled);
  for (std::size_t s : c.sample) c.cloud.events.push_back(c.events[s]);
  c.sample_labels = cut_dendrogram(single_linkage(sampled), c.features.threshold);
  return c;
}

/// Label of the nearest sample point (ties to the lowest sample position).
inline std::size_t nearest_sample_label(const DistanceMatrix& metric, const LocalComponent& c,
                                        std::size_t row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.sample.size(); ++k) {
    if (metric(row, c.sample[k]) < metric(row, c.sample[best])) best = k;
  }
  return c.sample_labels[best];
}

}  // namespace detail

/// Encounter metric, subsample, persistence, and embedding for window W_i.
/// Each encounter-graph component of at least min_component_size events is
/// mapped independently.
inline LocalMap local_map(std::span<const EncounterEvent> events,
                          const StaticIntervalLog& static_log, const WindowGrid& grid,
                          std::size_t i, const MappingParams& params) {
  LocalMap map;
  map.index = i;
  map.window = grid.window(i);
  map.events = window_events(events, i, grid);
  map.features.threshold = 0.0;
  if (map.events.empty()) return map;

  std::vector<EncounterEvent> subset;
  for (std::size_t k : map.events) subset.push_back(events[k]);
  const EncounterGraph graph = build_graph(subset, static_log, params.static_zeroing);

  for (const auto& vertices : graph_components(graph)) {
    if (vertices.size() < std::max<std::size_t>(params.min_component_size, 1)) {
      map.dropped_events += vertices.size();
      continue;
    }
    const DistanceMatrix metric = shortest_paths(induced_subgraph(graph, vertices));
    std::vector<std::size_t> positions;
    for (std::size_t v : vertices) positions.push_back(map.events[v]);
    LocalComponent c = detail::map_component(metric, positions, params);
    c.label_offset = map.component_count;
    for (std::size_t row = 0; row < c.events.size(); ++row) {
      map.label_of_event[c.events[row]] =
          c.label_offset + detail::nearest_sample_label(metric, c, row);
    }
    map.component_count += cluster_count(c.sample_labels);
    map.features.robust_components += c.features.robust_components;
    map.features.robust_holes += c.features.robust_holes;
    for (double l : c.features.component_lifetimes) map.features.component_lifetimes.push_back(l);
    for (double l : c.features.hole_lifetimes) map.features.hole_lifetimes.push_back(l);
    map.features.threshold = std::max(map.features.threshold, c.features.threshold);
    map.components.push_back(std::move(c));
  }
  map.degenerate = map.components.empty();
  return map;
}

// ---------------------------------------------------------------------------
// Seams between consecutive local maps.

/// Static agents with a static interval covering [t_i - dt, t_i + dt].
inline std::vector<int> join_set(const StaticIntervalLog& static_log, std::size_t i,
                                 const WindowGrid& grid) {
  if (i < 1 || i >= grid.count()) throw std::out_of_range("join_set: seam index must be in [1, N)");
  const double ti = grid.boundary(i);
  const double dt = grid.overlap();
  std::vector<int> ids;
  for (const auto& [id, intervals] : static_log) {
    for (const Interval& k : intervals) {
      if (k.begin <= ti - dt && k.end >= ti + dt) {
        ids.push_back(id);
        break;
      }
    }
  }
  return ids;
}

struct InterDomainCloud {
  std::size_t seam = 0;                   // joins M_seam and M_{seam+1}
  std::vector<int> static_ids;            // S_{i,i+1}
  std::vector<std::size_t> events;        // cloud event positions, ascending
  std::vector<int> join_id;               // joining static id per point, -1 for neighbors
  DistanceMatrix metric;                  // correspondence metric

  [[nodiscard]] bool empty() const { return events.empty(); }
};

/// Events of the joining static nodes (during their qualifying static
/// interval) plus each one's k nearest neighbors under the encounter metric
/// on W_i u W_{i+1}.
inline InterDomainCloud inter_domain_cloud(std::span<const EncounterEvent> events,
                                           const StaticIntervalLog& static_log,
                                           const WindowGrid& grid, std::size_t i,
                                           const MappingParams& params) {
  InterDomainCloud cloud;
  cloud.seam = i;
  cloud.static_ids = join_set(static_log, i, grid);
  if (cloud.static_ids.empty()) return cloud;

  const double ti = grid.boundary(i);
  const double dt = grid.overlap();
  std::map<int, Interval> qualifying;
  for (int id : cloud.static_ids) {
    for (const Interval& k : static_log.at(id)) {
      if (k.begin <= ti - dt && k.end >= ti + dt) {
        qualifying[id] = k;
        break;
      }
    }
  }

  const Interval span{grid.window(i).begin, grid.window(i + 1).end};
  std::vector<std::size_t> positions;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].interval().intersects(span)) positions.push_back(k);
  }
  if (positions.empty()) return cloud;
  std::vector<EncounterEvent> subset;
  for (std::size_t k : positions) subset.push_back(events[k]);
  const EncounterGraph graph = build_graph(subset, static_log, params.static_zeroing);

  std::map<std::size_t, int> joined;  // vertex -> static id
  for (std::size_t v = 0; v < subset.size(); ++v) {
    for (int id : {subset[v].id_a, subset[v].id_b}) {
      auto q = qualifying.find(id);
      if (q != qualifying.end() && subset[v].interval().intersects(q->second)) {
        joined.emplace(v, id);
        break;
      }
    }
  }
  if (joined.empty()) return cloud;

  std::map<std::size_t, std::vector<double>> rows;
  std::set<std::size_t> members;
  for (const auto& [v, id] : joined) {
    auto& row = rows[v] = dijkstra(graph, v);
    members.insert(v);
    std::vector<std::size_t> order;
    for (std::size_t u = 0; u < row.size(); ++u) {
      if (u != v && std::isfinite(row[u])) order.push_back(u);
    }
    const std::size_t k = std::min(params.knn_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return std::tie(row[a], a) < std::tie(row[b], b);
                      });
    members.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }

  const std::vector<std::size_t> vertices(members.begin(), members.end());
  cloud.metric = DistanceMatrix(vertices.size());
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    const std::size_t v = vertices[a];
    if (!rows.contains(v)) rows[v] = dijkstra(graph, v);
    cloud.events.push_back(positions[v]);
    auto j = joined.find(v);
    cloud.join_id.push_back(j == joined.end() ? -1 : j->second);
  }
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = 0; b < vertices.size(); ++b) {
      cloud.metric(a, b) = rows.at(vertices[a])[vertices[b]];
    }
  }
  return cloud;
}

struct ConnectionClusters {
  Dendrogram dendrogram;
  std::vector<std::size_t> labels;                    // per cloud point
  std::map<int, std::optional<std::size_t>> static_label;  // nullopt: ambiguous
  std::vector<std::size_t> connections;               // labels carrying an unambiguous join id

  [[nodiscard]] std::size_t connection_count() const { return connections.size(); }
};

/// Single-linkage clustering of an inter-domain cloud cut at `cutoff`.
inline ConnectionClusters cluster_connections(const InterDomainCloud& cloud, double cutoff) {
  ConnectionClusters out;
  if (cloud.empty()) return out;
  out.dendrogram = single_linkage(cloud.metric);
  out.labels = cut_dendrogram(out.dendrogram, cutoff);

  std::map<int, std::set<std::size_t>> seen;
  for (std::size_t p = 0; p < cloud.events.size(); ++p) {
    if (cloud.join_id[p] >= 0) seen[cloud.join_id[p]].insert(out.labels[p]);
  }
  std::set<std::size_t> carrying;
  for (const auto& [id, labels] : seen) {
    if (labels.size() == 1) {
      out.static_label[id] = *labels.begin();
      carrying.insert(*labels.begin());
    } else {
      out.static_label[id] = std::nullopt;
    }
  }
  out.connections.assign(carrying.begin(), carrying.end());
  return out;
}

// ---------------------------------------------------------------------------
// Stitching.

struct SeamResult {
  InterDomainCloud cloud;
  ConnectionClusters clusters;
};

struct GlobalNode {
  std::size_t map_index = 0;
  std::size_t component = 0;
  std::size_t robust_holes = 0;
};

struct GlobalEdge {
  std::size_t seam = 0;
  std::size_t cluster = 0;
  std::size_t from = 0;  // node in M_seam
  std::size_t to = 0;    // node in M_{seam+1}
  friend auto operator<=>(const GlobalEdge&, const GlobalEdge&) = default;
};

struct GlobalMap {
  std::vector<GlobalNode> nodes;
  std::vector<GlobalEdge> edges;
  std::size_t components = 0;
  std::size_t seam_cycles = 0;  // independent cycles of the stitched graph
  std::size_t local_holes = 0;  // robust holes inside local maps
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t holes() const { return seam_cycles + local_holes; }
};

namespace detail {

inline std::optional<std::size_t> side_label(const LocalMap& map, const InterDomainCloud& cloud,
                                             const std::vector<std::size_t>& labels,
                                             std::size_t cluster) {
  std::map<std::size_t, std::size_t> votes;
  for (std::size_t p = 0; p < cloud.events.size(); ++p) {
    if (labels[p] != cluster) continue;
    auto it = map.label_of_event.find(cloud.events[p]);
    if (it != map.label_of_event.end()) ++votes[it->second];
  }
  if (votes.empty()) {
    if (map.component_count == 1) return 0;
    return std::nullopt;
  }
  return std::max_element(votes.begin(), votes.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

}  // namespace detail

/// Graph of local-map components joined through each seam's connection clusters.
inline GlobalMap stitch(std::span<const LocalMap> maps, std::span<const SeamResult> seams) {
  GlobalMap g;
  std::map<std::size_t, const LocalMap*> by_index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> node_of;
  for (const LocalMap& m : maps) by_index[m.index] = &m;
  for (const auto& [index, m] : by_index) {
    if (m->degenerate) g.warnings.push_back("local map " + std::to_string(index) + " is degenerate");
    std::vector<std::size_t> holes(m->component_count, 0);
    for (const LocalComponent& c : m->components) {
      holes[c.label_offset] += c.features.robust_holes;
    }
    for (std::size_t c = 0; c < m->component_count; ++c) {
      node_of[{index, c}] = g.nodes.size();
      g.nodes.push_back({index, c, holes[c]});
    }
    g.local_holes += m->features.robust_holes;
  }

  for (const SeamResult& seam : seams) {
    const std::size_t i = seam.cloud.seam;
    const std::string tag = "seam " + std::to_string(i) + "-" + std::to_string(i + 1);
    const auto left = by_index.find(i);
    const auto right = by_index.find(i + 1);
    if (left == by_index.end() || right == by_index.end()) continue;
    if (seam.cloud.static_ids.empty() || seam.clusters.connections.empty()) {
      g.warnings.push_back(tag + ": no joining static nodes, maps left unconnected");
      continue;
    }
    for (std::size_t cluster : seam.clusters.connections) {
      const auto a = detail::side_label(*left->second, seam.cloud, seam.clusters.labels, cluster);
      const auto b = detail::side_label(*right->second, seam.cloud, seam.clusters.labels, cluster);
      if (!a || !b) {
        g.warnings.push_back(tag + ": cluster " + std::to_string(cluster) +
                             " has no labeled events on one side");
        continue;
      }
      g.edges.push_back({i, cluster, node_of.at({i, *a}), node_of.at({i + 1, *b})});
    }
  }
  std::sort(g.edges.begin(), g.edges.end());

  DisjointSets sets(g.nodes.size());
  for (const GlobalEdge& e : g.edges) sets.unite(e.from, e.to);
  std::set<std::size_t> roots;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) roots.insert(sets.find(n));
  g.components = roots.size();
  g.seam_cycles = g.edges.size() + g.components - g.nodes.size();
  if (g.components > 1) g.warnings.push_back("global map is disconnected");
  return g;
}

struct MappingResult {
  std::vector<LocalMap> local_maps;
  std::vector<SeamResult> seams;
  GlobalMap global;
};

/// Local maps for every window, seam clouds for every consecutive pair, and
/// the stitched global map.
inline MappingResult build_maps(std::span<const EncounterEvent> events,
                                const StaticIntervalLog& static_log, const WindowGrid& grid,
                                const MappingParams& params) {
  MappingResult r;
  for (std::size_t i = 1; i <= grid.count(); ++i) {
    r.local_maps.push_back(local_map(events, static_log, grid, i, params));
  }
  for (std::size_t i = 1; i < grid.count(); ++i) {
    SeamResult s;
    s.cloud = inter_domain_cloud(events, static_log, grid, i, params);
    s.clusters = cluster_connections(s.cloud, params.cluster_cutoff);
    r.seams.push_back(std::move(s));
  }
  r.global = stitch(r.local_maps, r.seams);
  return r;
}

}  // namespace topomap
