#pragma once

#include <cstddef>
#include <vector>

#include "bifwatch/density.hpp"

namespace bifwatch {

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;
  // Never dies inside the filtration; its death is pinned to the grid minimum.
  bool essential = false;

  double lifetime() const noexcept { return birth - death; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

// Superlevel persistence: birth >= death for every pair.
struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;

  std::size_t count(int dim) const;
};

struct PpdPoint {
  double birth = 0.0;
  double lifetime = 0.0;
  friend bool operator==(const PpdPoint&, const PpdPoint&) = default;
};

// Projected persistence diagram in (birth, lifetime) coordinates.
struct Ppd {
  int dim = 0;
  std::vector<PpdPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

// Cubical cells of an nx-by-nv image in doubled coordinates: cell (a, b)
// with 0 <= a <= 2 nx, 0 <= b <= 2 nv has dimension (a odd) + (b odd).
// Squares (odd, odd) carry the image values; every other cell carries the
// maximum over the squares it bounds (T-construction for superlevel sets).
class CubicalComplex {
 public:
  explicit CubicalComplex(const DensityGrid& grid);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t index(std::size_t a, std::size_t b) const noexcept { return a * height_ + b; }
  int dim(std::size_t cell) const noexcept;
  double value(std::size_t cell) const noexcept { return values_[cell]; }
  // Codimension-one faces, in no particular order.
  std::vector<std::size_t> boundary(std::size_t cell) const;
  // Cells sorted by decreasing value, then dimension, then index.
  std::vector<std::size_t> filtration_order() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

// Exact H0/H1 superlevel persistence by Z2 boundary-matrix reduction with
// clearing. Zero-persistence pairs are dropped except for the essential H0
// class, whose death is the global minimum of the grid.
PersistenceDiagram superlevel_persistence(const DensityGrid& grid);

// (birth, birth - death) for every pair of the requested dimension.
Ppd project(const PersistenceDiagram& pd, int dim);

}  // namespace bifwatch
