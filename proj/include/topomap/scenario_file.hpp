#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/scenario.hpp"

namespace topomap {

/// Scenario files are INI-style: `[section]` headers, `key = value` lines,
/// `#` comments. Lengths are meters, times seconds. Points are written as
/// `x y`; an obstacle is a comma-separated vertex list and may repeat:
///
///     [environment]
///     width = 6
///     height = 2
///     obstacle = 0.4 0.7, 0.9 0.7, 0.9 1.3, 0.4 1.3
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ScenarioParseError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
    throw ScenarioParseError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(d);
}

inline Vec2 parse_point(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  Vec2 p;
  std::string rest;
  if (!(in >> p.x >> p.y) || (in >> rest)) {
    throw ScenarioParseError(key + ": expected 'x y', got '" + v + "'");
  }
  return p;
}

inline std::vector<Vec2> parse_polygon(const std::string& key, const std::string& v) {
  std::vector<Vec2> poly;
  std::istringstream in(v);
  std::string vertex;
  while (std::getline(in, vertex, ',')) poly.push_back(parse_point(key, trim(vertex)));
  return poly;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig c;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioParseError(where + "unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::vector<std::string> known{"environment", "leader", "agents", "windows", "tda"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw ScenarioParseError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(where + "expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    auto num = [&] { return detail::parse_double(where + full, value); };
    auto count = [&] { return detail::parse_count(where + full, value); };
    auto point = [&] { return detail::parse_point(where + full, value); };

    if (section.empty() && key == "name") {
      c.name = value;
    } else if (section == "environment" && key == "width") {
      c.environment.width = num();
    } else if (section == "environment" && key == "height") {
      c.environment.height = num();
    } else if (section == "environment" && key == "obstacle") {
      c.environment.obstacles.push_back({detail::parse_polygon(where + full, value)});
    } else if (section == "leader" && key == "start") {
      c.leader.start = point();
    } else if (section == "leader" && key == "velocity") {
      c.leader.velocity = point();
    } else if (section == "leader" && key == "coverage_length") {
      c.leader.coverage_length = num();
    } else if (section == "agents" && key == "count") {
      c.agents.count = count();
    } else if (section == "agents" && key == "landmark_fraction") {
      c.agents.landmark_fraction = num();
    } else if (section == "agents" && key == "speed") {
      c.agents.speed = num();
    } else if (section == "agents" && key == "segment_length") {
      c.agents.segment_length = num();
    } else if (section == "agents" && key == "detection_radius") {
      c.agents.detection_radius = num();
    } else if (section == "agents" && key == "stop_probability") {
      c.agents.stop_probability = num();
    } else if (section == "agents" && key == "stop_duration_mean") {
      c.agents.stop_duration_mean = num();
    } else if (section == "agents" && key == "sim_dt") {
      c.agents.sim_dt = num();
    } else if (section == "agents" && key == "burn_in") {
      c.agents.burn_in = num();
    } else if (section == "agents" && key == "obstacle_clearance") {
      c.agents.obstacle_clearance = num();
    } else if (section == "agents" && key == "agent_clearance") {
      c.agents.agent_clearance = num();
    } else if (section == "agents" && key == "return_noise") {
      c.agents.return_noise = num();
    } else if (section == "agents" && key == "initial_center") {
      c.agents.initial_center = point();
    } else if (section == "agents" && key == "initial_radius") {
      c.agents.initial_radius = num();
    } else if (section == "windows" && key == "total_time") {
      c.windows.total_time = num();
    } else if (section == "windows" && key == "count") {
      c.windows.count = count();
    } else if (section == "windows" && key == "overlap") {
      c.windows.overlap = num();
    } else if (section == "tda" && key == "knn_k") {
      c.mapping.knn_k = count();
    } else if (section == "tda" && key == "cluster_cutoff") {
      c.mapping.cluster_cutoff = num();
    } else if (section == "tda" && key == "persistence_threshold") {
      c.mapping.persistence_threshold = num();
    } else if (section == "tda" && key == "subsample_size") {
      c.mapping.subsample_size = count();
    } else if (section == "tda" && key == "density_quantile") {
      c.mapping.density_quantile = num();
    } else if (section == "tda" && key == "density_percentile") {
      c.mapping.density_percentile = num();
    } else if (section == "tda" && key == "max_epsilon_factor") {
      c.mapping.max_epsilon_factor = num();
    } else if (section == "tda" && key == "min_component_size") {
      c.mapping.min_component_size = count();
    } else if (section == "tda" && key == "static_zeroing") {
      try {
        c.mapping.static_zeroing = parse_static_zeroing(value);
      } catch (const std::invalid_argument& e) {
        throw ScenarioParseError(where + e.what());
      }
    } else {
      throw ScenarioParseError(where + "unknown key '" + full + "'");
    }
  }
  return c;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

}  // namespace topomap
