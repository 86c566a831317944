#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace topomap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense square matrix of pairwise distances; +inf marks unreachable pairs.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {
    for (std::size_t i = 0; i < n; ++i) (*this)(i, i) = 0.0;
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }

  void set_symmetric(std::size_t i, std::size_t j, double d) {
    (*this)(i, j) = d;
    (*this)(j, i) = d;
  }

  /// Principal submatrix on `indices` (in the given order).
  [[nodiscard]] DistanceMatrix restrict(std::span<const std::size_t> indices) const {
    DistanceMatrix out(indices.size());
    for (std::size_t a = 0; a < indices.size(); ++a) {
      for (std::size_t b = 0; b < indices.size(); ++b) {
        out(a, b) = (*this)(indices[a], indices[b]);
      }
    }
    return out;
  }

  /// Largest finite entry.
  [[nodiscard]] double diameter() const {
    double d = 0.0;
    for (double v : data_) {
      if (std::isfinite(v) && v > d) d = v;
    }
    return d;
  }

  [[nodiscard]] bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace topomap
