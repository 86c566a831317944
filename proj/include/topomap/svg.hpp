#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "topomap/global_map.hpp"
#include "topomap/io.hpp"
#include "topomap/tda.hpp"

namespace topomap::svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string open(double w, double h, const std::string& config_hash) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<!-- config_hash=" + config_hash +
         " -->\n<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"white\" stroke=\"black\"/>\n";
}

inline std::string text(double x, double y, const std::string& s, const std::string& cls = "label") {
  return "<text class=\"" + cls + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + s + "</text>\n";
}

inline std::string placeholder(double w, double h, const std::string& config_hash,
                               const std::string& what) {
  return open(w, h, config_hash) + text(w / 2 - 40, h / 2, what, "placeholder") + "</svg>\n";
}

/// Birth/death plot: blue dimension-0 points, red dimension-1 points, dashed
/// line at lifetime == threshold. Infinite deaths sit on the top edge.
inline std::string persistence_diagram(const PersistenceDiagram& dgm, double threshold,
                                       const std::string& config_hash) {
  constexpr double size = 400, pad = 40, inner = size - 2 * pad;
  double hi = threshold;
  bool any = false;
  for (int d = 0; d < 2; ++d) {
    for (const PersistencePair& p : dgm[d]) {
      any = true;
      hi = std::max(hi, p.birth);
      if (!p.infinite()) hi = std::max(hi, p.death);
    }
  }
  if (!any) return placeholder(size, size, config_hash, "empty diagram");
  if (hi <= 0) hi = 1;
  hi *= 1.05;
  const auto px = [&](double v) { return pad + inner * v / hi; };
  const auto py = [&](double v) { return size - pad - inner * v / hi; };

  std::string s = open(size, size, config_hash);
  s += "<line class=\"diagonal\" x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
       num(px(hi)) + "\" y2=\"" + num(py(hi)) + "\" stroke=\"gray\"/>\n";
  s += "<line class=\"threshold\" x1=\"" + num(px(0)) + "\" y1=\"" + num(py(threshold)) +
       "\" x2=\"" + num(px(hi - threshold)) + "\" y2=\"" + num(py(hi)) +
       "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  const char* colors[2] = {"blue", "red"};
  for (int d = 0; d < 2; ++d) {
    for (const PersistencePair& p : dgm[d]) {
      const double y = p.infinite() ? pad : py(p.death);
      s += "<circle class=\"dim" + std::to_string(d) + "\" cx=\"" + num(px(p.birth)) +
           "\" cy=\"" + num(y) + "\" r=\"3\" fill=\"" + colors[d] + "\"/>\n";
    }
  }
  s += text(pad, size - 10, "birth") + text(5, pad - 10, "death");
  s += "</svg>\n";
  return s;
}

struct ComponentView {
  std::vector<io::PointRow> points;
  PersistenceDiagram diagram;
  double threshold = 0.0;
};

/// Point clouds on their first two embedding axes, one panel per component.
/// Each robust hole adds a highlighted region around its component.
inline std::string local_sketch(const std::vector<ComponentView>& components,
                                const std::string& config_hash) {
  constexpr double panel = 300, pad = 20;
  std::size_t drawn = 0;
  for (const auto& c : components) drawn += c.points.empty() ? 0 : 1;
  if (drawn == 0) return placeholder(panel, panel, config_hash, "empty map");

  std::string s = open(panel * static_cast<double>(components.size()), panel, config_hash);
  for (std::size_t k = 0; k < components.size(); ++k) {
    const ComponentView& c = components[k];
    const double x0 = panel * static_cast<double>(k);
    if (c.points.empty()) continue;
    double lo_x = c.points[0].x, hi_x = lo_x, lo_y = c.points[0].y, hi_y = lo_y;
    double cx = 0, cy = 0;
    for (const auto& p : c.points) {
      lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
      cx += p.x, cy += p.y;
    }
    cx /= static_cast<double>(c.points.size());
    cy /= static_cast<double>(c.points.size());
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    const double scale = (panel - 2 * pad) / span;
    const auto px = [&](double v) { return x0 + pad + (v - lo_x) * scale; };
    const auto py = [&](double v) { return panel - pad - (v - lo_y) * scale; };

    const FeatureReport f = classify(c.diagram, c.threshold);
    for (std::size_t h = 0; h < f.robust_holes; ++h) {
      std::vector<double> radii;
      for (const auto& p : c.points) radii.push_back(std::hypot(p.x - cx, p.y - cy));
      std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(radii.size() / 2),
                       radii.end());
      const double r = radii[radii.size() / 2] * scale * (1.0 - 0.15 * static_cast<double>(h));
      s += "<circle class=\"hole\" cx=\"" + num(px(cx)) + "\" cy=\"" + num(py(cy)) + "\" r=\"" +
           num(r) + "\" fill=\"orange\" fill-opacity=\"0.25\" stroke=\"orange\"/>\n";
    }
    for (const auto& p : c.points) {
      s += "<circle class=\"point\" cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) +
           "\" r=\"2\" fill=\"deeppink\"/>\n";
    }
    s += text(x0 + 5, 15, "component " + std::to_string(k) + ": " +
                              std::to_string(f.robust_holes) + " hole(s)");
  }
  s += "</svg>\n";
  return s;
}

struct GlobalView {
  std::size_t windows = 0;
  std::vector<GlobalNode> nodes;
  std::vector<GlobalEdge> edges;
  std::size_t components = 0;
  std::size_t holes = 0;
};

/// One panel per local map, a seam band between consecutive panels, nodes per
/// local component and edges per seam connection.
inline std::string global_map(const GlobalView& g, const std::string& config_hash) {
  constexpr double panel = 160, band = 40, height = 240;
  if (g.windows == 0) return placeholder(panel, height, config_hash, "empty map");
  const double width = static_cast<double>(g.windows) * panel +
                       static_cast<double>(g.windows - 1) * band;
  const auto panel_x = [&](std::size_t map_index) {
    return static_cast<double>(map_index - 1) * (panel + band);
  };

  std::map<std::size_t, std::size_t> per_map;
  for (const auto& n : g.nodes) per_map[n.map_index] = std::max(per_map[n.map_index], n.component + 1);
  const auto node_pos = [&](const GlobalNode& n) {
    const double slots = static_cast<double>(per_map[n.map_index] + 1);
    return std::pair{panel_x(n.map_index) + panel / 2,
                     30 + (height - 40) * static_cast<double>(n.component + 1) / slots};
  };

  std::string s = open(width, height, config_hash);
  for (std::size_t i = 1; i <= g.windows; ++i) {
    s += "<rect class=\"panel\" x=\"" + num(panel_x(i)) + "\" y=\"20\" width=\"" + num(panel) +
         "\" height=\"" + num(height - 20) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += text(panel_x(i) + 5, 15, "M" + std::to_string(i));
    if (i < g.windows) {
      s += "<rect class=\"seam\" x=\"" + num(panel_x(i) + panel) + "\" y=\"20\" width=\"" +
           num(band) + "\" height=\"" + num(height - 20) +
           "\" fill=\"lightgray\" fill-opacity=\"0.5\"/>\n";
    }
  }
  for (const auto& e : g.edges) {
    const auto [x1, y1] = node_pos(g.nodes[e.from]);
    const auto [x2, y2] = node_pos(g.nodes[e.to]);
    s += "<line class=\"connection\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
         num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"green\" stroke-width=\"2\"/>\n";
  }
  for (const auto& n : g.nodes) {
    const auto [x, y] = node_pos(n);
    s += "<circle class=\"node\" cx=\"" + num(x) + "\" cy=\"" + num(y) +
         "\" r=\"10\" fill=\"deeppink\"/>\n";
    if (n.robust_holes > 0) {
      s += "<circle class=\"hole\" cx=\"" + num(x) + "\" cy=\"" + num(y) +
           "\" r=\"5\" fill=\"white\"/>\n";
    }
  }
  s += text(5, height - 5, std::to_string(g.components) + " component(s), " +
                               std::to_string(g.holes) + " hole(s)");
  s += "</svg>\n";
  return s;
}

}  // namespace topomap::svg
