#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "topomap/geometry.hpp"

namespace topomap {

/// Closed time interval [begin, end] in seconds.
struct Interval {
  double begin = 0.0;
  double end = 0.0;

  [[nodiscard]] constexpr bool intersects(const Interval& o) const {
    return begin <= o.end && o.begin <= end;
  }
  [[nodiscard]] constexpr bool contains(double t) const { return begin <= t && t <= end; }
  [[nodiscard]] constexpr double length() const { return end - begin; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

struct Obstacle {
  std::vector<Vec2> polygon;
};

struct Environment {
  double width = 0.0;   // x extent, meters
  double height = 0.0;  // y extent, meters
  std::vector<Obstacle> obstacles;

  [[nodiscard]] Rect bounds() const { return {0.0, 0.0, width, height}; }
};

/// Straight constant-velocity sweep. The coverage rectangle has length
/// `coverage_length` along the (axis-aligned) sweep direction and spans the
/// full environment across it.
struct LeaderPath {
  Vec2 start;
  Vec2 velocity;
  double coverage_length = 0.0;
};

enum class StaticZeroing { None, Strict, SameStaticInterval };

struct AgentParams {
  std::size_t count = 0;
  double landmark_fraction = 0.1;
  double speed = 0.1;             // v_m, m/s
  double segment_length = 0.5;    // lambda, m
  double detection_radius = 0.01; // r_d, m
  double stop_probability = 0.1;
  double stop_duration_mean = 2.0;  // s
  double sim_dt = 0.1;              // s
  double burn_in = 0.0;             // s
  double obstacle_clearance = -1.0; // m; negative means r_d
  double agent_clearance = -1.0;    // m; negative means r_d / 2
  double return_noise = 0.0;        // rad, std-dev of heading noise while returning
  Vec2 initial_center;
  double initial_radius = 0.0;

  [[nodiscard]] double obstacle_gap() const {
    return obstacle_clearance < 0.0 ? detection_radius : obstacle_clearance;
  }
  [[nodiscard]] double agent_gap() const {
    return agent_clearance < 0.0 ? detection_radius / 2.0 : agent_clearance;
  }
};

struct WindowParams {
  double total_time = 0.0;  // T, s
  std::size_t count = 1;    // N
  double overlap = 0.0;     // delta t, s
};

struct MappingParams {
  std::size_t knn_k = 3;
  double cluster_cutoff = 50.0;          // seconds of encounter-graph path length
  double persistence_threshold = 0.2;    // fraction of max epsilon
  std::size_t subsample_size = 150;
  double density_quantile = 0.1;
  double density_percentile = 0.05;
  double max_epsilon_factor = 1.05;
  std::size_t min_component_size = 10;
  StaticZeroing static_zeroing = StaticZeroing::SameStaticInterval;
};

struct ScenarioConfig {
  std::string name;
  Environment environment;
  LeaderPath leader;
  AgentParams agents;
  WindowParams windows;
  MappingParams mapping;
};

inline std::string to_string(StaticZeroing z) {
  switch (z) {
    case StaticZeroing::None: return "none";
    case StaticZeroing::Strict: return "strict";
    case StaticZeroing::SameStaticInterval: return "same_static_interval";
  }
  return "unknown";
}

inline StaticZeroing parse_static_zeroing(const std::string& s) {
  if (s == "none") return StaticZeroing::None;
  if (s == "strict") return StaticZeroing::Strict;
  if (s == "same_static_interval") return StaticZeroing::SameStaticInterval;
  throw std::invalid_argument("unknown static_zeroing mode: " + s);
}

/// Evenly spaced window grid t_i = i*T/N with windows widened by overlap/2
/// on each side and clamped to [0, T].
class WindowGrid {
 public:
  WindowGrid(double total_time, std::size_t count, double overlap)
      : total_time_(total_time), count_(count), overlap_(overlap) {
    if (count == 0) throw std::invalid_argument("window count must be positive");
  }
  explicit WindowGrid(const WindowParams& p) : WindowGrid(p.total_time, p.count, p.overlap) {}

  [[nodiscard]] std::size_t count() const { return count_; }
  [[nodiscard]] double overlap() const { return overlap_; }
  [[nodiscard]] double total_time() const { return total_time_; }

  /// Grid point t_i, 0 <= i <= N.
  [[nodiscard]] double boundary(std::size_t i) const {
    if (i > count_) throw std::out_of_range("window boundary index");
    return total_time_ * static_cast<double>(i) / static_cast<double>(count_);
  }

  /// W_i for 1 <= i <= N.
  [[nodiscard]] Interval window(std::size_t i) const {
    if (i < 1 || i > count_) throw std::out_of_range("window index must be in [1, N]");
    return {std::max(0.0, boundary(i - 1) - overlap_ / 2.0),
            std::min(total_time_, boundary(i) + overlap_ / 2.0)};
  }

  [[nodiscard]] std::vector<Interval> windows() const {
    std::vector<Interval> out;
    for (std::size_t i = 1; i <= count_; ++i) out.push_back(window(i));
    return out;
  }

 private:
  double total_time_;
  std::size_t count_;
  double overlap_;
};

namespace detail {

inline bool sweeps_along_x(const LeaderPath& leader) { return leader.velocity.y == 0.0; }

inline void check_time(const ScenarioConfig& config, double t) {
  if (!(t >= 0.0 && t <= config.windows.total_time)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
  }
}

/// Slab of length `length` centered on `center` along the sweep axis,
/// clipped to the environment.
inline Rect sweep_slab(const ScenarioConfig& config, double lo, double hi) {
  const Rect bounds = config.environment.bounds();
  if (sweeps_along_x(config.leader)) {
    return bounds.intersect({lo, -INFINITY, hi, INFINITY});
  }
  return bounds.intersect({-INFINITY, lo, INFINITY, hi});
}

inline double along(const ScenarioConfig& config, Vec2 p) {
  return sweeps_along_x(config.leader) ? p.x : p.y;
}

}  // namespace detail

inline Vec2 leader_position(const ScenarioConfig& config, double t) {
  detail::check_time(config, t);
  return config.leader.start + t * config.leader.velocity;
}

/// D(t): coverage rectangle around the leader, intersected with the environment.
inline Rect coverage_rect(const ScenarioConfig& config, double t) {
  const double c = detail::along(config, leader_position(config, t));
  const double half = config.leader.coverage_length / 2.0;
  return detail::sweep_slab(config, c - half, c + half);
}

inline bool in_coverage(const ScenarioConfig& config, Vec2 p, double t) {
  return coverage_rect(config, t).contains(p);
}

/// D_i, the union of D(t) over W_i. A straight sweep makes this one rectangle.
inline Rect local_domain(const ScenarioConfig& config, std::size_t i) {
  const Interval w = WindowGrid(config.windows).window(i);
  const double a = detail::along(config, leader_position(config, w.begin));
  const double b = detail::along(config, leader_position(config, w.end));
  const double half = config.leader.coverage_length / 2.0;
  return detail::sweep_slab(config, std::min(a, b) - half, std::max(a, b) + half);
}

/// Union of D(t) over [0, T].
inline Rect swept_region(const ScenarioConfig& config) {
  const double a = detail::along(config, leader_position(config, 0.0));
  const double b = detail::along(config, leader_position(config, config.windows.total_time));
  const double half = config.leader.coverage_length / 2.0;
  return detail::sweep_slab(config, std::min(a, b) - half, std::max(a, b) + half);
}

/// Every violated invariant, as a human-readable line. Empty means valid.
inline std::vector<std::string> validate(const ScenarioConfig& config) {
  std::vector<std::string> v;
  const auto& env = config.environment;
  const auto& leader = config.leader;
  const auto& agents = config.agents;
  const auto& win = config.windows;
  const auto& map = config.mapping;

  if (!(env.width > 0.0) || !(env.height > 0.0)) {
    v.emplace_back("environment: width and height must be positive");
  }
  const Rect bounds = env.bounds();
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    const auto& poly = env.obstacles[i].polygon;
    const std::string tag = "obstacle " + std::to_string(i + 1) + ": ";
    if (poly.size() < 3) {
      v.push_back(tag + "needs at least 3 vertices");
      continue;
    }
    if (!is_simple_polygon(poly)) v.push_back(tag + "edges self-intersect");
    if (!(std::abs(signed_area(poly)) > 0.0)) v.push_back(tag + "zero area");
    const Rect box = bounding_box(poly);
    if (!(box.x_min > 0.0 && box.y_min > 0.0 && box.x_max < env.width &&
          box.y_max < env.height)) {
      v.push_back(tag + "not strictly inside the environment");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& other = env.obstacles[j].polygon;
      if (other.size() >= 3 && polygons_overlap(poly, other)) {
        v.push_back(tag + "overlaps obstacle " + std::to_string(j + 1));
      }
    }
  }

  const double leader_speed = norm(leader.velocity);
  if (!(leader_speed > 0.0)) v.emplace_back("leader: velocity must be nonzero");
  if (leader.velocity.x != 0.0 && leader.velocity.y != 0.0) {
    v.emplace_back("leader: velocity must be axis-aligned");
  }
  if (!(leader.coverage_length > 0.0)) v.emplace_back("leader: coverage_length must be positive");

  if (agents.count == 0) v.emplace_back("agents: count must be positive");
  if (!(agents.landmark_fraction > 0.0 && agents.landmark_fraction < 1.0)) {
    v.emplace_back("agents: landmark_fraction must be in (0, 1)");
  }
  if (!(agents.speed > 0.0)) v.emplace_back("agents: speed must be positive");
  if (!(agents.segment_length > 0.0)) v.emplace_back("agents: segment_length must be positive");
  if (!(agents.detection_radius > 0.0)) v.emplace_back("agents: detection_radius must be positive");
  if (!(agents.stop_probability >= 0.0 && agents.stop_probability <= 1.0)) {
    v.emplace_back("agents: stop_probability must be in [0, 1]");
  }
  if (!(agents.stop_duration_mean >= 0.0)) v.emplace_back("agents: stop_duration_mean must be >= 0");
  if (!(agents.sim_dt > 0.0)) v.emplace_back("agents: sim_dt must be positive");
  if (!(agents.burn_in >= 0.0)) v.emplace_back("agents: burn_in must be >= 0");
  if (!(agents.speed > leader_speed)) {
    v.emplace_back("agents: speed must exceed the leader speed");
  }

  if (!(win.total_time >= 0.0)) v.emplace_back("windows: total_time must be >= 0");
  if (win.count == 0) {
    v.emplace_back("windows: count must be positive");
  } else if (!(win.overlap >= 0.0 &&
               win.overlap < win.total_time / static_cast<double>(win.count))) {
    v.emplace_back("windows: overlap must satisfy 0 <= overlap < T/N");
  }

  if (!(map.cluster_cutoff >= 0.0)) v.emplace_back("tda: cluster_cutoff must be >= 0");
  if (!(map.persistence_threshold >= 0.0)) v.emplace_back("tda: persistence_threshold must be >= 0");
  if (map.subsample_size == 0) v.emplace_back("tda: subsample_size must be positive");
  if (!(map.density_quantile >= 0.0 && map.density_quantile < 1.0)) {
    v.emplace_back("tda: density_quantile must be in [0, 1)");
  }
  if (!(map.max_epsilon_factor > 0.0)) v.emplace_back("tda: max_epsilon_factor must be positive");

  // Geometry-dependent checks only make sense on a sane environment and leader.
  if (env.width > 0.0 && env.height > 0.0 && win.total_time >= 0.0) {
    const Vec2 a = leader.start;
    const Vec2 b = leader.start + win.total_time * leader.velocity;
    if (!bounds.contains(a) || !bounds.contains(b)) {
      v.emplace_back("leader: path leaves the environment within [0, T]");
    }
    if (leader.coverage_length > 0.0 && (leader.velocity.x == 0.0 || leader.velocity.y == 0.0) &&
        leader_speed > 0.0) {
      if (!swept_region(config).contains(bounds)) {
        v.emplace_back("coverage: leader sweep does not cover the environment over [0, T]");
      }
    }
  }
  return v;
}

}  // namespace topomap
