#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "topomap/geometry.hpp"
#include "topomap/scenario.hpp"

namespace topomap {

using Rng = std::mt19937_64;

enum class AgentMode { RandomWalk, Static, Returning };

inline const char* to_string(AgentMode m) {
  switch (m) {
    case AgentMode::RandomWalk: return "RANDOM_WALK";
    case AgentMode::Static: return "STATIC";
    case AgentMode::Returning: return "RETURNING";
  }
  return "UNKNOWN";
}

struct AgentState {
  int id = 0;
  Vec2 position;
  double heading = 0.0;
  AgentMode mode = AgentMode::RandomWalk;
  double segment_remaining = 0.0;
  double stop_remaining = 0.0;
};

/// Maximal interval during which agents id_a < id_b stayed within r_d.
struct EncounterEvent {
  double t0 = 0.0;
  double t1 = 0.0;
  int id_a = 0;
  int id_b = 0;
  std::size_t index = 0;

  [[nodiscard]] Interval interval() const { return {t0, t1}; }
  [[nodiscard]] bool involves(int id) const { return id_a == id || id_b == id; }
  friend bool operator==(const EncounterEvent&, const EncounterEvent&) = default;
};

/// Agent id -> sorted, disjoint static intervals.
using StaticIntervalLog = std::map<int, std::vector<Interval>>;

struct TrajectorySample {
  double t = 0.0;
  int id = 0;
  Vec2 position;
  AgentMode mode = AgentMode::RandomWalk;
};

inline double draw_segment_length(Rng& rng, double mean) {
  return std::exponential_distribution<double>(1.0 / mean)(rng);
}

inline double draw_heading(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
}

// ---------------------------------------------------------------------------
// Landmark selection on the r_d communication graph.

using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency proximity_graph(std::span<const Vec2> positions, double radius) {
  Adjacency adj(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (distance(positions[i], positions[j]) <= radius) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Multi-source BFS hop counts; kUnreachable where no source reaches.
inline std::vector<std::size_t> hop_distances(const Adjacency& adj,
                                              std::span<const std::size_t> sources) {
  std::vector<std::size_t> hops(adj.size(), kUnreachable);
  std::vector<std::size_t> frontier;
  for (std::size_t s : sources) {
    if (hops[s] != 0) {
      hops[s] = 0;
      frontier.push_back(s);
    }
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const std::size_t u = frontier[head];
    for (std::size_t v : adj[u]) {
      if (hops[v] == kUnreachable) {
        hops[v] = hops[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return hops;
}

/// Candidate maximizing the minimum hop distance to `landmarks`; unreachable
/// counts as farthest. Ties are broken uniformly at random.
inline std::optional<std::size_t> maxmin_pick(const Adjacency& adj,
                                              std::span<const std::size_t> landmarks,
                                              std::span<const std::size_t> candidates, Rng& rng) {
  if (candidates.empty()) return std::nullopt;
  const auto hops = hop_distances(adj, landmarks);
  std::size_t best = 0;
  std::vector<std::size_t> tied;
  for (std::size_t c : candidates) {
    if (tied.empty() || hops[c] > best) {
      best = hops[c];
      tied.assign(1, c);
    } else if (hops[c] == best) {
      tied.push_back(c);
    }
  }
  if (tied.size() == 1) return tied.front();
  std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
  return tied[pick(rng)];
}

/// Greedy MaxMin on one connected graph starting from `first`.
inline std::vector<std::size_t> maxmin_landmarks(const Adjacency& adj, std::size_t count,
                                                 std::size_t first, Rng& rng) {
  std::vector<std::size_t> chosen{first};
  std::vector<bool> taken(adj.size(), false);
  taken[first] = true;
  while (chosen.size() < std::min(count, adj.size())) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (!taken[i]) candidates.push_back(i);
    }
    const auto next = maxmin_pick(adj, chosen, candidates, rng);
    chosen.push_back(*next);
    taken[*next] = true;
  }
  return chosen;
}

inline std::vector<std::size_t> connected_components(const Adjacency& adj) {
  std::vector<std::size_t> label(adj.size(), kUnreachable);
  std::size_t next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (label[s] != kUnreachable) continue;
    const std::size_t src[] = {s};
    const auto hops = hop_distances(adj, src);
    for (std::size_t v = 0; v < adj.size(); ++v) {
      if (hops[v] != kUnreachable) label[v] = next;
    }
    ++next;
  }
  return label;
}

/// Picks ceil(fraction * n) landmark agent ids. The first pick in each
/// communication cluster is random; later picks maximize hop distance to
/// landmarks already in that cluster. Clusters receive picks with probability
/// proportional to their remaining non-landmark agents.
inline std::vector<int> select_landmarks(std::span<const AgentState> agents, double radius,
                                         double fraction, Rng& rng) {
  if (agents.empty()) throw std::invalid_argument("select_landmarks: empty agent set");
  const std::size_t n = agents.size();
  const auto wanted = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)), 1, n);

  std::vector<Vec2> positions;
  for (const auto& a : agents) positions.push_back(a.position);
  const Adjacency adj = proximity_graph(positions, radius);
  const auto cluster = connected_components(adj);

  std::vector<bool> taken(n, false);
  std::vector<std::size_t> chosen;
  while (chosen.size() < wanted) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) pool.push_back(i);
    }
    const std::size_t drawn = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    const std::size_t c = cluster[drawn];

    std::vector<std::size_t> in_cluster;
    std::vector<std::size_t> free_in_cluster;
    for (std::size_t i = 0; i < n; ++i) {
      if (cluster[i] != c) continue;
      if (taken[i]) {
        in_cluster.push_back(i);
      } else {
        free_in_cluster.push_back(i);
      }
    }
    const std::size_t pick =
        in_cluster.empty() ? drawn : *maxmin_pick(adj, in_cluster, free_in_cluster, rng);
    taken[pick] = true;
    chosen.push_back(pick);
  }

  std::vector<int> ids;
  for (std::size_t i : chosen) ids.push_back(agents[i].id);
  return ids;
}

// ---------------------------------------------------------------------------
// Encounter bookkeeping.

/// Tracks open encounters between agent indices 0..n-1 on the step grid.
class EncounterTracker {
 public:
  explicit EncounterTracker(std::size_t agent_count, double radius)
      : n_(agent_count), radius_(radius), open_(n_ * n_, kClosed) {}

  /// Opens events for pairs newly within range at time t and closes the
  /// others at their last in-range time `t_prev`.
  void update(std::span<const AgentState> agents, double t, double t_prev) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = a + 1; b < n_; ++b) {
        const bool near = distance(agents[a].position, agents[b].position) <= radius_;
        double& since = open_[a * n_ + b];
        if (near && since == kClosed) {
          since = t;
        } else if (!near && since != kClosed) {
          close(agents, a, b, t_prev);
        }
      }
    }
  }

  /// Closes every open event at t_end.
  void finish(std::span<const AgentState> agents, double t_end) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = a + 1; b < n_; ++b) {
        if (open_[a * n_ + b] != kClosed) close(agents, a, b, t_end);
      }
    }
  }

  [[nodiscard]] std::size_t open_count() const {
    return static_cast<std::size_t>(
        std::count_if(open_.begin(), open_.end(), [](double v) { return v != kClosed; }));
  }
  [[nodiscard]] const std::vector<EncounterEvent>& closed() const { return closed_; }
  std::vector<EncounterEvent> take_closed() { return std::move(closed_); }

 private:
  static constexpr double kClosed = -1.0;

  void close(std::span<const AgentState> agents, std::size_t a, std::size_t b, double t1) {
    double& since = open_[a * n_ + b];
    const int ia = agents[a].id;
    const int ib = agents[b].id;
    closed_.push_back({since, t1, std::min(ia, ib), std::max(ia, ib), 0});
    since = kClosed;
  }

  std::size_t n_;
  double radius_;
  std::vector<double> open_;
  std::vector<EncounterEvent> closed_;
};

/// Sorts by (t0, t1, id_a, id_b) and assigns sequence numbers.
inline void finalize_events(std::vector<EncounterEvent>& events) {
  std::sort(events.begin(), events.end(), [](const EncounterEvent& x, const EncounterEvent& y) {
    return std::tie(x.t0, x.t1, x.id_a, x.id_b) < std::tie(y.t0, y.t1, y.id_a, y.id_b);
  });
  for (std::size_t i = 0; i < events.size(); ++i) events[i].index = i;
}

// ---------------------------------------------------------------------------
// World stepping.

struct World {
  std::vector<AgentState> agents;
  std::size_t step_index = 0;
  double dt = 0.1;
  std::map<int, double> static_since;  // open static intervals of current landmarks
  StaticIntervalLog static_log;        // closed static intervals

  [[nodiscard]] double time() const { return static_cast<double>(step_index) * dt; }
  [[nodiscard]] std::size_t landmark_count() const { return static_since.size(); }
};

namespace detail {

inline bool step_feasible(const ScenarioConfig& config, std::span<const AgentState> agents,
                          std::size_t self, Vec2 from, Vec2 to,
                          const std::optional<Rect>& fence) {
  const auto& env = config.environment;
  if (!env.bounds().contains(to)) return false;
  if (fence && !fence->contains(to) && fence->contains(from)) return false;
  const double gap = config.agents.obstacle_gap();
  for (const auto& obstacle : env.obstacles) {
    const auto& poly = obstacle.polygon;
    if (point_in_polygon(to, poly)) return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (segments_intersect(from, to, poly[i], poly[(i + 1) % poly.size()])) return false;
    }
    const double d_to = boundary_distance(to, poly);
    if (d_to < gap && d_to <= boundary_distance(from, poly)) return false;
  }
  const double agent_gap = config.agents.agent_gap();
  if (agent_gap > 0.0) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (j == self) continue;
      const double d_to = distance(to, agents[j].position);
      if (d_to < agent_gap && d_to < distance(from, agents[j].position)) return false;
    }
  }
  return true;
}

inline constexpr int kMaxRedraws = 16;

/// Advances agent `self` along `heading`, redrawing the heading on collision.
/// Returns false when every redraw was blocked and the agent held position.
inline bool advance(const ScenarioConfig& config, std::vector<AgentState>& agents,
                    std::size_t self, double heading, Rng& rng,
                    const std::optional<Rect>& fence) {
  AgentState& a = agents[self];
  const double stride = config.agents.speed * config.agents.sim_dt;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    if (attempt > 0) heading = draw_heading(rng);
    const Vec2 to = a.position + stride * unit_from_angle(heading);
    if (step_feasible(config, agents, self, a.position, to, fence)) {
      a.position = to;
      a.heading = heading;
      return true;
    }
  }
  a.heading = heading;
  return false;
}

inline void new_segment(const ScenarioConfig& config, AgentState& a, Rng& rng) {
  a.segment_remaining = draw_segment_length(rng, config.agents.segment_length);
  a.heading = draw_heading(rng);
}

inline void random_walk(const ScenarioConfig& config, std::vector<AgentState>& agents,
                        std::size_t self, Rng& rng, const std::optional<Rect>& fence) {
  AgentState& a = agents[self];
  if (a.stop_remaining > 0.0) {
    a.stop_remaining = std::max(0.0, a.stop_remaining - config.agents.sim_dt);
    return;
  }
  if (advance(config, agents, self, a.heading, rng, fence)) {
    a.segment_remaining -= config.agents.speed * config.agents.sim_dt;
  }
  if (a.segment_remaining <= 0.0) {
    new_segment(config, a, rng);
    if (std::bernoulli_distribution(config.agents.stop_probability)(rng)) {
      a.stop_remaining = std::exponential_distribution<double>(
          1.0 / std::max(config.agents.stop_duration_mean, 1e-12))(rng);
    }
  }
}

inline void open_static(World& world, std::size_t agent_index, double t) {
  AgentState& a = world.agents[agent_index];
  a.mode = AgentMode::Static;
  a.stop_remaining = 0.0;
  world.static_since[a.id] = t;
}

inline void close_static(World& world, AgentState& a, double t) {
  auto it = world.static_since.find(a.id);
  if (it == world.static_since.end()) return;
  world.static_log[a.id].push_back({it->second, t});
  world.static_since.erase(it);
}

}  // namespace detail

/// Places agents around the configured start point inside D(0) and lets them
/// random-walk for the burn-in time, fenced to D(0). No events are recorded.
inline World disperse(const ScenarioConfig& config, Rng& rng) {
  World world;
  world.dt = config.agents.sim_dt;
  const Rect d0 = coverage_rect(config, 0.0);
  const auto& env = config.environment;
  auto free_at = [&](Vec2 p) {
    if (!d0.contains(p)) return false;
    for (const auto& o : env.obstacles) {
      if (point_in_polygon(p, o.polygon)) return false;
    }
    return true;
  };
  const Vec2 center = config.agents.initial_center;
  if (!free_at(center)) {
    throw std::invalid_argument("agents: initial_center must lie in free space inside D(0)");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < config.agents.count; ++i) {
    AgentState a;
    a.id = static_cast<int>(i);
    a.position = center;
    if (config.agents.initial_radius > 0.0) {
      for (int tries = 0; tries < 1000; ++tries) {
        const double r = config.agents.initial_radius * std::sqrt(unit(rng));
        const Vec2 p = center + r * unit_from_angle(draw_heading(rng));
        if (free_at(p)) {
          a.position = p;
          break;
        }
      }
    }
    detail::new_segment(config, a, rng);
    world.agents.push_back(a);
  }

  const auto burn_steps =
      static_cast<std::size_t>(std::llround(config.agents.burn_in / config.agents.sim_dt));
  const std::optional<Rect> fence = d0;
  for (std::size_t s = 0; s < burn_steps; ++s) {
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
      detail::random_walk(config, world.agents, i, rng, fence);
    }
  }
  for (auto& a : world.agents) a.stop_remaining = 0.0;
  return world;
}

/// Chooses a replacement landmark among non-landmark agents inside D(t).
inline std::optional<std::size_t> select_replacement(const ScenarioConfig& config,
                                                     const World& world, double t, Rng& rng) {
  std::vector<Vec2> positions;
  std::vector<std::size_t> landmarks;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const auto& a = world.agents[i];
    positions.push_back(a.position);
    if (a.mode == AgentMode::Static) {
      landmarks.push_back(i);
    } else if (in_coverage(config, a.position, t)) {
      candidates.push_back(i);
    }
  }
  const Adjacency adj = proximity_graph(positions, config.agents.detection_radius);
  return maxmin_pick(adj, landmarks, candidates, rng);
}

/// One simulation step: landmark hand-over for landmarks outside D(t), then
/// motion of every non-static agent.
inline void step(const ScenarioConfig& config, World& world, Rng& rng) {
  ++world.step_index;
  const double t = world.time();

  std::size_t exited = 0;
  for (auto& a : world.agents) {
    if (a.mode == AgentMode::Static && !in_coverage(config, a.position, t)) {
      detail::close_static(world, a, t);
      a.mode = AgentMode::RandomWalk;
      detail::new_segment(config, a, rng);
      ++exited;
    }
  }
  for (std::size_t k = 0; k < exited; ++k) {
    if (auto pick = select_replacement(config, world, t, rng)) {
      detail::open_static(world, *pick, t);
    }
  }

  const Vec2 leader = leader_position(config, t);
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    AgentState& a = world.agents[i];
    if (a.mode == AgentMode::Static) continue;
    if (!in_coverage(config, a.position, t)) {
      if (a.mode != AgentMode::Returning) a.segment_remaining = 0.0;
      a.mode = AgentMode::Returning;
      a.stop_remaining = 0.0;
      // Blocked homing escapes along a random segment before aiming again.
      if (a.segment_remaining > 0.0) {
        if (detail::advance(config, world.agents, i, a.heading, rng, std::nullopt)) {
          a.segment_remaining -= config.agents.speed * config.agents.sim_dt;
        } else {
          a.segment_remaining = 0.0;
        }
        continue;
      }
      const Vec2 to_leader = leader - a.position;
      double heading = std::atan2(to_leader.y, to_leader.x);
      if (config.agents.return_noise > 0.0) {
        heading += std::normal_distribution<double>(0.0, config.agents.return_noise)(rng);
      }
      const Vec2 before = a.position;
      detail::advance(config, world.agents, i, heading, rng, std::nullopt);
      if (a.position == before || a.heading != heading) {
        a.segment_remaining = draw_segment_length(rng, config.agents.segment_length);
      }
      continue;
    }
    if (a.mode == AgentMode::Returning) {
      a.mode = AgentMode::RandomWalk;
      detail::new_segment(config, a, rng);
    }
    detail::random_walk(config, world.agents, i, rng, std::nullopt);
  }
}

struct SimulationResult {
  std::vector<EncounterEvent> events;
  StaticIntervalLog static_log;
  std::vector<TrajectorySample> trajectory;
  std::vector<int> initial_landmarks;
};

inline void record_trajectory(const World& world, std::vector<TrajectorySample>& out) {
  for (const auto& a : world.agents) out.push_back({world.time(), a.id, a.position, a.mode});
}

/// Full run over [0, T]. Throws std::invalid_argument listing violations when
/// the scenario is invalid.
inline SimulationResult run(const ScenarioConfig& config, std::uint64_t seed,
                            bool keep_trajectory = false) {
  if (config.windows.total_time == 0.0) return {};
  if (const auto violations = validate(config); !violations.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }

  Rng rng(seed);
  World world = disperse(config, rng);
  SimulationResult result;
  result.initial_landmarks = select_landmarks(world.agents, config.agents.detection_radius,
                                              config.agents.landmark_fraction, rng);
  for (int id : result.initial_landmarks) {
    detail::open_static(world, static_cast<std::size_t>(id), 0.0);
  }

  EncounterTracker tracker(world.agents.size(), config.agents.detection_radius);
  tracker.update(world.agents, 0.0, 0.0);
  if (keep_trajectory) record_trajectory(world, result.trajectory);

  const auto steps = static_cast<std::size_t>(
      std::floor(config.windows.total_time / config.agents.sim_dt + 1e-9));
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_prev = world.time();
    step(config, world, rng);
    tracker.update(world.agents, world.time(), t_prev);
    if (keep_trajectory) record_trajectory(world, result.trajectory);
  }
  const double t_end = world.time();
  tracker.finish(world.agents, t_end);
  for (auto& a : world.agents) {
    if (a.mode == AgentMode::Static) detail::close_static(world, a, t_end);
  }

  result.events = tracker.take_closed();
  finalize_events(result.events);
  result.static_log = std::move(world.static_log);
  for (auto& [id, intervals] : result.static_log) {
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& x, const Interval& y) { return x.begin < y.begin; });
  }
  return result;
}

}  // namespace topomap
