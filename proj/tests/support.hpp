#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "topomap/distance_matrix.hpp"
#include "topomap/geometry.hpp"
#include "topomap/scenario.hpp"

namespace topomap::fixtures {

/// 10 x 30 arena swept along x with a 3 m coverage window.
inline ScenarioConfig arena(std::vector<Obstacle> obstacles = {}) {
  ScenarioConfig c;
  c.name = "arena";
  c.environment = {30.0, 10.0, std::move(obstacles)};
  c.leader = {{1.5, 5.0}, {0.005, 0.0}, 3.0};
  c.agents.count = 100;
  c.agents.detection_radius = 0.01;
  c.agents.initial_center = {1.5, 5.0};
  c.agents.initial_radius = 1.0;
  c.windows = {5400.0, 4, 60.0};
  return c;
}

/// Small, fast scenario: 2 x 2 m, slow leader, everything inside D(t).
inline ScenarioConfig small_scenario(std::size_t agents = 30, double total_time = 120.0) {
  ScenarioConfig c;
  c.name = "small";
  c.environment = {2.0, 2.0, {}};
  c.leader = {{1.0, 1.0}, {0.001, 0.0}, 2.0};
  c.agents.count = agents;
  c.agents.landmark_fraction = 0.1;
  c.agents.speed = 0.1;
  c.agents.segment_length = 0.5;
  c.agents.detection_radius = 0.1;
  c.agents.burn_in = 10.0;
  c.agents.initial_center = {1.0, 1.0};
  c.agents.initial_radius = 0.5;
  c.windows = {total_time, 2, 10.0};
  c.mapping.subsample_size = 40;
  c.mapping.min_component_size = 5;
  return c;
}

inline Obstacle box(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

inline DistanceMatrix euclidean(const std::vector<std::vector<double>>& pts) {
  DistanceMatrix m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      m(i, j) = std::sqrt(s);
    }
  }
  return m;
}

inline std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n,
                                                      std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& x : p) x = u(rng);
  }
  return pts;
}

/// Symmetric random metric-like matrix with integer entries so ties occur.
inline DistanceMatrix random_tied_matrix(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> u(1, levels);
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.set_symmetric(i, j, u(rng));
  }
  return m;
}

}  // namespace topomap::fixtures
