#include "bifwatch/cubical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

// Sparse Z2 column, row positions kept in ascending order.
using Column = std::vector<std::size_t>;

void add_into(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(),
                                source.end(), std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

std::size_t PersistenceDiagram::count(int dim) const {
  return static_cast<std::size_t>(std::count_if(
      pairs.begin(), pairs.end(), [dim](const auto& p) { return p.dim == dim; }));
}

CubicalComplex::CubicalComplex(const DensityGrid& grid)
    : width_(2 * grid.spec.nx + 1), height_(2 * grid.spec.nv + 1) {
  if (grid.values.size() != grid.spec.nx * grid.spec.nv)
    throw Error(ErrorKind::InvalidArgument, "grid value count does not match its spec");
  for (double v : grid.values)
    if (!std::isfinite(v))
      throw Error(ErrorKind::InvalidArgument, "grid values must be finite");

  values_.assign(width_ * height_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < grid.spec.nx; ++i)
    for (std::size_t j = 0; j < grid.spec.nv; ++j)
      values_[index(2 * i + 1, 2 * j + 1)] = grid.at(i, j);

  // Faces take the max over adjacent squares.
  for (std::size_t a = 0; a < width_; ++a) {
    for (std::size_t b = 0; b < height_; ++b) {
      if ((a & 1) && (b & 1)) continue;
      double best = -std::numeric_limits<double>::infinity();
      const std::size_t a_lo = (a & 1) ? a : (a == 0 ? 1 : a - 1);
      const std::size_t a_hi = (a & 1) ? a : std::min(a + 1, width_ - 2);
      const std::size_t b_lo = (b & 1) ? b : (b == 0 ? 1 : b - 1);
      const std::size_t b_hi = (b & 1) ? b : std::min(b + 1, height_ - 2);
      for (std::size_t sa = a_lo; sa <= a_hi; sa += 2)
        for (std::size_t sb = b_lo; sb <= b_hi; sb += 2)
          best = std::max(best, values_[index(sa, sb)]);
      values_[index(a, b)] = best;
    }
  }
}

int CubicalComplex::dim(std::size_t cell) const noexcept {
  const std::size_t a = cell / height_;
  const std::size_t b = cell % height_;
  return static_cast<int>((a & 1) + (b & 1));
}

std::vector<std::size_t> CubicalComplex::boundary(std::size_t cell) const {
  const std::size_t a = cell / height_;
  const std::size_t b = cell % height_;
  std::vector<std::size_t> faces;
  if (a & 1) {
    faces.push_back(index(a - 1, b));
    faces.push_back(index(a + 1, b));
  }
  if (b & 1) {
    faces.push_back(index(a, b - 1));
    faces.push_back(index(a, b + 1));
  }
  return faces;
}

std::vector<std::size_t> CubicalComplex::filtration_order() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [this](std::size_t l, std::size_t r) {
    if (values_[l] != values_[r]) return values_[l] > values_[r];
    const int dl = dim(l);
    const int dr = dim(r);
    if (dl != dr) return dl < dr;
    return l < r;
  });
  return order;
}

PersistenceDiagram superlevel_persistence(const DensityGrid& grid) {
  const CubicalComplex complex(grid);
  const auto order = complex.filtration_order();
  const std::size_t n = order.size();
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // pivot_owner[row] = filtration position of the column whose low is row.
  std::vector<std::size_t> pivot_owner(n, kNone);
  std::vector<bool> paired(n, false);
  std::vector<bool> cleared(n, false);
  std::vector<Column> reduced(n);
  Column scratch;

  PersistenceDiagram pd;
  auto reduce_dimension = [&](int d) {
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t cell = order[p];
      if (complex.dim(cell) != d || cleared[p]) continue;
      Column col;
      for (std::size_t face : complex.boundary(cell)) col.push_back(position[face]);
      std::sort(col.begin(), col.end());
      while (!col.empty() && pivot_owner[col.back()] != kNone)
        add_into(col, reduced[pivot_owner[col.back()]], scratch);
      if (col.empty()) continue;
      const std::size_t low = col.back();
      pivot_owner[low] = p;
      paired[low] = paired[p] = true;
      // A face killed here is a creator whose own column reduces to zero.
      cleared[low] = true;
      const double birth = complex.value(order[low]);
      const double death = complex.value(cell);
      if (birth != death) pd.pairs.push_back({d - 1, birth, death, false});
      reduced[p] = std::move(col);
    }
  };
  reduce_dimension(2);
  reduce_dimension(1);

  const double floor = grid.min_value();
  for (std::size_t p = 0; p < n; ++p) {
    if (paired[p]) continue;
    const int d = complex.dim(order[p]);
    if (d > 1) continue;
    pd.pairs.push_back({d, complex.value(order[p]), floor, true});
  }

  std::stable_sort(pd.pairs.begin(), pd.pairs.end(),
                   [](const PersistencePair& l, const PersistencePair& r) {
                     if (l.dim != r.dim) return l.dim < r.dim;
                     if (l.birth != r.birth) return l.birth > r.birth;
                     return l.death < r.death;
                   });
  return pd;
}

Ppd project(const PersistenceDiagram& pd, int dim) {
  Ppd out{dim, {}};
  for (const auto& pair : pd.pairs)
    if (pair.dim == dim) out.points.push_back({pair.birth, pair.birth - pair.death});
  return out;
}

}  // namespace bifwatch
