#include "bifwatch/point_pattern.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double axis_bandwidth(std::span<const PpdPoint> points, double PpdPoint::*axis,
                      double extent) {
  const double fallback = 0.05 * extent;
  if (points.size() < 2) return fallback;
  const auto n = static_cast<double>(points.size());
  double mean = 0.0;
  for (const auto& p : points) mean += p.*axis;
  mean /= n;
  double ss = 0.0;
  for (const auto& p : points) ss += (p.*axis - mean) * (p.*axis - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double h = 1.06 * sd * std::pow(n, -0.2);
  if (!(h > 0.0)) return fallback;
  return std::max(h, 1e-3 * extent);
}

double cross(const PpdPoint& o, const PpdPoint& a, const PpdPoint& b) {
  return (a.birth - o.birth) * (b.lifetime - o.lifetime) -
         (a.lifetime - o.lifetime) * (b.birth - o.birth);
}

// Keeps the part of `poly` closer to `site` than to `other`.
std::vector<PpdPoint> clip_half_plane(const std::vector<PpdPoint>& poly,
                                      const PpdPoint& site, const PpdPoint& other) {
  const double nx = other.birth - site.birth;
  const double ny = other.lifetime - site.lifetime;
  const double mx = 0.5 * (other.birth + site.birth);
  const double my = 0.5 * (other.lifetime + site.lifetime);
  auto side = [&](const PpdPoint& p) { return (p.birth - mx) * nx + (p.lifetime - my) * ny; };

  std::vector<PpdPoint> out;
  out.reserve(poly.size() + 1);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const PpdPoint& cur = poly[k];
    const PpdPoint& next = poly[(k + 1) % poly.size()];
    const double sc = side(cur);
    const double sn = side(next);
    if (sc <= 0.0) out.push_back(cur);
    if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur.birth + t * (next.birth - cur.birth),
                     cur.lifetime + t * (next.lifetime - cur.lifetime)});
    }
  }
  return out;
}

}  // namespace

Domain Domain::for_ppd(const Ppd& ppd) {
  double max_life = 0.0;
  for (const auto& p : ppd.points) {
    if (!(p.birth >= 0.0 && p.birth <= 1.0) || !(p.lifetime >= 0.0))
      throw Error(ErrorKind::InvalidArgument,
                  "PPD points must have birth in [0, 1] and non-negative lifetime");
    max_life = std::max(max_life, p.lifetime);
  }
  Domain d;
  // An all-zero-lifetime diagram still needs a box with area.
  d.lifetime_max = max_life > 0.0 ? 1.5 * max_life : 1e-6;
  return d;
}

bool Domain::contains(const PpdPoint& p) const noexcept {
  return p.birth >= birth_min && p.birth <= birth_max && p.lifetime >= lifetime_min &&
         p.lifetime <= lifetime_max;
}

PpdPoint Domain::sample_uniform(Rng& rng) const {
  std::uniform_real_distribution<double> ub(birth_min, birth_max);
  std::uniform_real_distribution<double> ul(lifetime_min, lifetime_max);
  const double b = ub(rng);
  return {b, ul(rng)};
}

double distance(const PpdPoint& a, const PpdPoint& b) noexcept {
  return std::hypot(a.birth - b.birth, a.lifetime - b.lifetime);
}

double median_nearest_neighbor(std::span<const PpdPoint> points) {
  if (points.size() < 2)
    throw Error(ErrorKind::TooFewPoints, "nearest neighbours need at least 2 points");
  std::vector<double> nn(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j)
      if (i != j) nn[i] = std::min(nn[i], distance(points[i], points[j]));
  return quantile(std::move(nn), 0.5);
}

std::size_t count_within(const PpdPoint& u, std::span<const PpdPoint> points,
                         double r, std::size_t skip) {
  std::size_t count = 0;
  const double r2 = r * r;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == skip) continue;
    const double db = points[i].birth - u.birth;
    const double dl = points[i].lifetime - u.lifetime;
    if (db * db + dl * dl <= r2) ++count;
  }
  return count;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PointDensity PointDensity::uniform(const Domain& domain) {
  PointDensity d;
  d.uniform_ = true;
  d.domain_ = domain;
  d.log_norm_ = -std::log(domain.area());
  return d;
}

PointDensity PointDensity::kde(std::span<const PpdPoint> points, const Domain& domain) {
  if (points.empty()) throw Error(ErrorKind::EmptyPpd, "KDE over an empty PPD");
  PointDensity d;
  d.uniform_ = false;
  d.domain_ = domain;
  d.centers_.assign(points.begin(), points.end());
  d.bw_birth_ = axis_bandwidth(points, &PpdPoint::birth, domain.birth_max - domain.birth_min);
  d.bw_lifetime_ = axis_bandwidth(points, &PpdPoint::lifetime,
                                  domain.lifetime_max - domain.lifetime_min);
  double mass = 0.0;
  for (const auto& c : d.centers_) {
    const double mb = normal_cdf((domain.birth_max - c.birth) / d.bw_birth_) -
                      normal_cdf((domain.birth_min - c.birth) / d.bw_birth_);
    const double ml = normal_cdf((domain.lifetime_max - c.lifetime) / d.bw_lifetime_) -
                      normal_cdf((domain.lifetime_min - c.lifetime) / d.bw_lifetime_);
    mass += mb * ml;
  }
  // Mixture of normalized kernels, divided by the mass it keeps in the domain.
  d.log_norm_ = -kLogTwoPi - std::log(d.bw_birth_ * d.bw_lifetime_) -
                std::log(mass / static_cast<double>(d.centers_.size()));
  return d;
}

double PointDensity::log_value(const PpdPoint& u) const {
  if (uniform_) return domain_.contains(u) ? log_norm_ : -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> terms;
  terms.resize(centers_.size());
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double zb = (u.birth - centers_[i].birth) / bw_birth_;
    const double zl = (u.lifetime - centers_[i].lifetime) / bw_lifetime_;
    terms[i] = -0.5 * (zb * zb + zl * zl);
    best = std::max(best, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - best);
  return best + std::log(sum) + log_norm_ - std::log(static_cast<double>(centers_.size()));
}

double PointDensity::value(const PpdPoint& u) const { return std::exp(log_value(u)); }

double Polygon::area() const noexcept {
  double twice = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const auto& a = vertices[k];
    const auto& b = vertices[(k + 1) % vertices.size()];
    twice += a.birth * b.lifetime - b.birth * a.lifetime;
  }
  return 0.5 * std::abs(twice);
}

bool Polygon::contains(const PpdPoint& p) const noexcept {
  if (vertices.size() < 3) return false;
  for (std::size_t k = 0; k < vertices.size(); ++k)
    if (cross(vertices[k], vertices[(k + 1) % vertices.size()], p) < -1e-15) return false;
  return true;
}

PpdPoint Polygon::sample_uniform(Rng& rng) const {
  if (vertices.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "empty polygon");
  std::vector<double> cumulative;
  cumulative.reserve(vertices.size() - 2);
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < vertices.size(); ++k) {
    total += 0.5 * std::abs(cross(vertices[0], vertices[k], vertices[k + 1]));
    cumulative.push_back(total);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pick = unit(rng) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
  const std::size_t t = std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  const PpdPoint& a = vertices[0];
  const PpdPoint& b = vertices[t + 1];
  const PpdPoint& c = vertices[t + 2];
  double s = unit(rng);
  double w = unit(rng);
  if (s + w > 1.0) {
    s = 1.0 - s;
    w = 1.0 - w;
  }
  return {a.birth + s * (b.birth - a.birth) + w * (c.birth - a.birth),
          a.lifetime + s * (b.lifetime - a.lifetime) + w * (c.lifetime - a.lifetime)};
}

std::vector<Polygon> clipped_voronoi(std::span<const PpdPoint> sites, const Domain& domain) {
  std::vector<Polygon> cells(sites.size());
  const std::vector<PpdPoint> box{{domain.birth_min, domain.lifetime_min},
                                  {domain.birth_max, domain.lifetime_min},
                                  {domain.birth_max, domain.lifetime_max},
                                  {domain.birth_min, domain.lifetime_max}};
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<PpdPoint> poly = box;
    for (std::size_t j = 0; j < sites.size() && !poly.empty(); ++j) {
      if (j == i || sites[j] == sites[i]) continue;
      poly = clip_half_plane(poly, sites[i], sites[j]);
    }
    cells[i].vertices = std::move(poly);
  }
  return cells;
}

bool is_degenerate_configuration(std::span<const PpdPoint> points) {
  std::vector<PpdPoint> distinct;
  for (const auto& p : points)
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  if (distinct.size() < 3) return true;
  double scale = 0.0;
  for (const auto& p : distinct) scale = std::max(scale, distance(p, distinct[0]));
  const double tol = 1e-12 * scale * scale;
  const PpdPoint& o = distinct[0];
  const PpdPoint& a = *std::max_element(
      distinct.begin(), distinct.end(),
      [&o](const PpdPoint& l, const PpdPoint& r) { return distance(o, l) < distance(o, r); });
  for (const auto& p : distinct)
    if (std::abs(cross(o, a, p)) > tol) return false;
  return true;
}

std::vector<double> fit_logistic(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels, double ridge) {
  if (features.empty() || features.size() != labels.size())
    throw Error(ErrorKind::InvalidArgument, "logistic fit needs matching rows and labels");
  const auto rows = static_cast<Eigen::Index>(features.size());
  const auto cols = static_cast<Eigen::Index>(features.front().size() + 1);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = features[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < cols; ++k) x(i, k) = row[static_cast<std::size_t>(k - 1)];
    y(i) = labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(cols, ridge);
  penalty(0) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(cols);
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd p(rows);
    Eigen::VectorXd w(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Eigen::VectorXd grad = x.transpose() * (y - p) - penalty.cwiseProduct(beta);
    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return {beta.data(), beta.data() + beta.size()};
}

}  // namespace bifwatch
