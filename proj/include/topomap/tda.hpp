#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "topomap/distance_matrix.hpp"

namespace topomap {

/// Vertex, edge, or triangle of a Rips complex with its filtration value.
struct Simplex {
  std::array<std::uint32_t, 3> vertices{};  // ascending; only the first dim + 1 are used
  int dim = 0;
  double value = 0.0;

  [[nodiscard]] std::span<const std::uint32_t> verts() const {
    return {vertices.data(), static_cast<std::size_t>(dim + 1)};
  }
};

/// Order by (value, dimension, lexicographic vertex tuple).
inline bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(a.verts().begin(), a.verts().end(), b.verts().begin(),
                                      b.verts().end());
}

struct RipsFiltration {
  std::size_t vertex_count = 0;
  std::vector<Simplex> simplices;  // filtration order, faces before cofaces
};

/// Vietoris-Rips filtration up to triangles, keeping edges of length <= max_epsilon.
inline RipsFiltration rips_filtration(const DistanceMatrix& metric, double max_epsilon) {
  if (max_epsilon < 0.0) throw std::invalid_argument("rips_filtration: max_epsilon < 0");
  const auto n = static_cast<std::uint32_t>(metric.size());
  RipsFiltration f;
  f.vertex_count = n;
  for (std::uint32_t v = 0; v < n; ++v) f.simplices.push_back({{v, 0, 0}, 0, 0.0});

  auto present = [&](std::uint32_t i, std::uint32_t j) { return metric(i, j) <= max_epsilon; };
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (!present(i, j)) continue;
      f.simplices.push_back({{i, j, 0}, 1, metric(i, j)});
      for (std::uint32_t k = j + 1; k < n; ++k) {
        if (present(i, k) && present(j, k)) {
          f.simplices.push_back(
              {{i, j, k}, 2, std::max({metric(i, j), metric(i, k), metric(j, k)})});
        }
      }
    }
  }
  std::sort(f.simplices.begin(), f.simplices.end(), filtration_less);
  return f;
}

struct PersistencePair {
  double birth = 0.0;
  double death = kInfinity;

  [[nodiscard]] double lifetime() const { return death - birth; }
  [[nodiscard]] bool infinite() const { return std::isinf(death); }
  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

/// Diagrams in homology dimensions 0 and 1.
struct PersistenceDiagram {
  std::array<std::vector<PersistencePair>, 2> dims;

  [[nodiscard]] const std::vector<PersistencePair>& operator[](int d) const { return dims.at(static_cast<std::size_t>(d)); }
  std::vector<PersistencePair>& operator[](int d) { return dims.at(static_cast<std::size_t>(d)); }

  /// Sorts each dimension so diagrams compare as multisets.
  void normalize() {
    for (auto& d : dims) std::sort(d.begin(), d.end());
  }
};

namespace detail {

inline constexpr std::size_t kNoPivot = std::numeric_limits<std::size_t>::max();

/// Index of each face of `s` in filtration order; -1 entries never occur for
/// a valid filtration.
class FaceIndex {
 public:
  explicit FaceIndex(const RipsFiltration& f)
      : n_(f.vertex_count), vertex_(n_, kNoPivot), edge_(n_ * n_, kNoPivot) {
    for (std::size_t k = 0; k < f.simplices.size(); ++k) {
      const Simplex& s = f.simplices[k];
      if (s.dim == 0) vertex_[s.vertices[0]] = k;
      if (s.dim == 1) edge_[s.vertices[0] * n_ + s.vertices[1]] = k;
    }
  }

  [[nodiscard]] std::vector<std::size_t> boundary(const Simplex& s) const {
    std::vector<std::size_t> b;
    if (s.dim == 1) {
      b = {vertex_[s.vertices[0]], vertex_[s.vertices[1]]};
    } else if (s.dim == 2) {
      const auto [i, j, k] = s.vertices;
      b = {edge_[i * n_ + j], edge_[i * n_ + k], edge_[j * n_ + k]};
    }
    for (std::size_t x : b) {
      if (x == kNoPivot) throw std::invalid_argument("persistence: face missing from filtration");
    }
    std::sort(b.begin(), b.end());
    return b;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> vertex_;
  std::vector<std::size_t> edge_;
};

/// Z/2 column addition of sorted index lists.
inline void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source,
                       std::vector<std::size_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace detail

/// Boundary-matrix column reduction over Z/2. Triangles are reduced first so
/// that edges killed by a triangle can be skipped (clearing); zero-length
/// bars are dropped and unpaired simplices give infinite bars.
inline PersistenceDiagram persistence(const RipsFiltration& f) {
  const std::size_t m = f.simplices.size();
  const detail::FaceIndex faces(f);
  std::vector<std::size_t> pivot_owner(m, detail::kNoPivot);  // row -> column with that pivot
  std::vector<bool> cleared(m, false);
  std::vector<bool> killed(m, false);  // appears as a pivot, i.e. a negative simplex's partner
  std::vector<std::vector<std::size_t>> reduced(m);
  std::vector<std::size_t> scratch;

  auto reduce = [&](std::size_t j) {
    std::vector<std::size_t> col = faces.boundary(f.simplices[j]);
    while (!col.empty()) {
      const std::size_t low = col.back();
      const std::size_t owner = pivot_owner[low];
      if (owner == detail::kNoPivot) break;
      detail::add_column(col, reduced[owner], scratch);
    }
    if (!col.empty()) {
      pivot_owner[col.back()] = j;
      killed[col.back()] = true;
      reduced[j] = std::move(col);
    }
  };

  for (int dim : {2, 1}) {
    for (std::size_t j = 0; j < m; ++j) {
      if (f.simplices[j].dim != dim) continue;
      if (killed[j]) {
        cleared[j] = true;  // positive edge: its column reduces to zero
        continue;
      }
      reduce(j);
    }
  }

  PersistenceDiagram dgm;
  for (std::size_t j = 0; j < m; ++j) {
    if (reduced[j].empty()) continue;
    const std::size_t birth = reduced[j].back();
    const int d = f.simplices[birth].dim;
    const double b = f.simplices[birth].value;
    const double dv = f.simplices[j].value;
    if (d <= 1 && dv > b) dgm[d].push_back({b, dv});
  }
  for (std::size_t j = 0; j < m; ++j) {
    const Simplex& s = f.simplices[j];
    if (s.dim > 1 || killed[j]) continue;
    const bool negative = !reduced[j].empty();
    if (!negative) dgm[s.dim].push_back({s.value, kInfinity});
  }
  dgm.normalize();
  return dgm;
}

struct FeatureReport {
  std::size_t robust_components = 0;
  std::size_t robust_holes = 0;
  std::vector<double> component_lifetimes;  // robust dimension-0 lifetimes
  std::vector<double> hole_lifetimes;       // robust dimension-1 lifetimes
  double threshold = 0.0;
};

/// Features with lifetime strictly above `threshold`; infinite bars always count.
inline FeatureReport classify(const PersistenceDiagram& dgm, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("classify: threshold must be >= 0");
  FeatureReport r;
  r.threshold = threshold;
  for (const auto& p : dgm[0]) {
    if (p.infinite() || p.lifetime() > threshold) r.component_lifetimes.push_back(p.lifetime());
  }
  for (const auto& p : dgm[1]) {
    if (p.infinite() || p.lifetime() > threshold) r.hole_lifetimes.push_back(p.lifetime());
  }
  r.robust_components = r.component_lifetimes.size();
  r.robust_holes = r.hole_lifetimes.size();
  return r;
}

/// (beta_0, beta_1) at scale epsilon: bars with birth <= epsilon < death.
inline std::pair<std::size_t, std::size_t> betti_at(const PersistenceDiagram& dgm, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("betti_at: epsilon must be >= 0");
  std::array<std::size_t, 2> b{0, 0};
  for (int d = 0; d < 2; ++d) {
    for (const auto& p : dgm[d]) {
      if (p.birth <= epsilon && epsilon < p.death) ++b[static_cast<std::size_t>(d)];
    }
  }
  return {b[0], b[1]};
}

}  // namespace topomap
