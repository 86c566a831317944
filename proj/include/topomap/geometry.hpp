#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace topomap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_angle(double radians) { return {std::cos(radians), std::sin(radians)}; }

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  [[nodiscard]] constexpr bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  [[nodiscard]] constexpr bool contains(const Rect& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }
  [[nodiscard]] constexpr double width() const { return x_max - x_min; }
  [[nodiscard]] constexpr double height() const { return y_max - y_min; }
  [[nodiscard]] constexpr bool empty() const { return x_max < x_min || y_max < y_min; }

  [[nodiscard]] constexpr Rect intersect(const Rect& r) const {
    return {std::max(x_min, r.x_min), std::max(y_min, r.y_min), std::min(x_max, r.x_max),
            std::min(y_max, r.y_max)};
  }
  /// True when the intersection has positive area.
  [[nodiscard]] constexpr bool overlaps_interior(const Rect& r) const {
    const Rect i = intersect(r);
    return i.x_max > i.x_min && i.y_max > i.y_min;
  }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Signed shoelace area; positive for counter-clockwise vertex order.
inline double signed_area(std::span<const Vec2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Even-odd crossing test. Points on the boundary may go either way; callers
/// that care pair it with boundary_distance().
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline double boundary_distance(Vec2 p, std::span<const Vec2> poly) {
  double best = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection, including touching and collinear overlap.
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

/// Non-adjacent edges must not touch; adjacent edges may only share their vertex.
inline bool is_simple_polygon(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a1 = poly[i];
    const Vec2 a2 = poly[(i + 1) % n];
    if (a1 == a2) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2 b1 = poly[j];
      const Vec2 b2 = poly[(j + 1) % n];
      if (adjacent) {
        // Folding back onto the previous edge.
        const Vec2 shared = (j == i + 1) ? a2 : a1;
        const Vec2 other_a = (j == i + 1) ? a1 : a2;
        const Vec2 other_b = (j == i + 1) ? b2 : b1;
        if (orientation(other_a, shared, other_b) == 0 &&
            dot(other_a - shared, other_b - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

inline Rect bounding_box(std::span<const Vec2> poly) {
  Rect r{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const Vec2& v : poly) {
    r.x_min = std::min(r.x_min, v.x);
    r.y_min = std::min(r.y_min, v.y);
    r.x_max = std::max(r.x_max, v.x);
    r.y_max = std::max(r.y_max, v.y);
  }
  return r;
}

/// Interiors intersect: any edge crossing, or one polygon inside the other.
inline bool polygons_overlap(std::span<const Vec2> a, std::span<const Vec2> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) {
        return true;
      }
    }
  }
  return point_in_polygon(a.front(), b) || point_in_polygon(b.front(), a);
}

}  // namespace topomap
