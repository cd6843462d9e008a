#pragma once

// Independent reference computations used by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "bifwatch/cubical.hpp"
#include "bifwatch/density.hpp"
#include "bifwatch/rng.hpp"

namespace oracle {

struct Betti {
  long b0 = 0;
  long b1 = 0;
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Betti numbers of the superlevel set {value >= a} of an nx-by-nv image,
// pixels being closed unit squares. b0 by union-find over lattice vertices,
// b1 from the Euler characteristic V - E + F.
inline Betti superlevel_betti(const bifwatch::DensityGrid& g, double a) {
  const std::size_t nx = g.spec.nx, nv = g.spec.nv;
  auto in = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(nv))
      return false;
    return g.at(i, j) >= a;
  };
  const std::size_t W = nx + 1, H = nv + 1;
  std::vector<char> vert(W * H, 0);
  long F = 0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      if (in(i, j)) {
        ++F;
        vert[i * H + j] = vert[(i + 1) * H + j] = 1;
        vert[i * H + j + 1] = vert[(i + 1) * H + j + 1] = 1;
      }
  long V = std::count(vert.begin(), vert.end(), 1);
  long E = 0;
  UnionFind uf(W * H);
  // horizontal edge (i,j)-(i+1,j) belongs to squares (i,j-1) and (i,j)
  for (long i = 0; i < static_cast<long>(nx); ++i)
    for (long j = 0; j <= static_cast<long>(nv); ++j)
      if (in(i, j - 1) || in(i, j)) {
        ++E;
        uf.unite(i * H + j, (i + 1) * H + j);
      }
  for (long i = 0; i <= static_cast<long>(nx); ++i)
    for (long j = 0; j < static_cast<long>(nv); ++j)
      if (in(i - 1, j) || in(i, j)) {
        ++E;
        uf.unite(i * H + j, i * H + j + 1);
      }
  long b0 = 0;
  for (std::size_t k = 0; k < W * H; ++k)
    if (vert[k] && uf.find(k) == k) ++b0;
  return {b0, b0 - (V - E + F)};
}

// Betti numbers read off a diagram: a finite pair is alive on (death, birth],
// the essential class on [death, birth].
inline Betti diagram_betti(const bifwatch::PersistenceDiagram& pd, double a) {
  Betti b;
  for (const auto& p : pd.pairs) {
    bool alive = p.essential ? (a <= p.birth && a >= p.death)
                             : (a <= p.birth && a > p.death);
    if (!alive) continue;
    (p.dim == 0 ? b.b0 : b.b1) += 1;
  }
  return b;
}

// Random image with values on a coarse lattice so that ties are common.
inline bifwatch::DensityGrid random_grid(bifwatch::Rng& rng, std::size_t max_side) {
  std::uniform_int_distribution<std::size_t> side(1, max_side);
  std::uniform_int_distribution<int> level(0, 9);
  bifwatch::DensityGrid g;
  g.spec.nx = side(rng);
  g.spec.nv = side(rng);
  g.values.resize(g.spec.nx * g.spec.nv);
  for (auto& v : g.values) v = level(rng) / 9.0;
  return g;
}

// Sample variance with n - 1.
inline double variance(const std::vector<double>& x) {
  double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

// Mahalanobis distances computed from scratch with an explicit 2x2 inverse.
inline std::vector<double> mahalanobis(const bifwatch::Ppd& ppd) {
  const auto& p = ppd.points;
  double n = p.size(), mb = 0, ml = 0;
  for (auto& q : p) { mb += q.birth; ml += q.lifetime; }
  mb /= n; ml /= n;
  double sbb = 0, sbl = 0, sll = 0;
  for (auto& q : p) {
    sbb += (q.birth - mb) * (q.birth - mb);
    sbl += (q.birth - mb) * (q.lifetime - ml);
    sll += (q.lifetime - ml) * (q.lifetime - ml);
  }
  sbb /= n - 1; sbl /= n - 1; sll /= n - 1;
  double det = sbb * sll - sbl * sbl;
  std::vector<double> md;
  for (auto& q : p) {
    double db = q.birth - mb, dl = q.lifetime - ml;
    md.push_back(std::sqrt((sll * db * db - 2 * sbl * db * dl + sbb * dl * dl) / det));
  }
  return md;
}

}  // namespace oracle
