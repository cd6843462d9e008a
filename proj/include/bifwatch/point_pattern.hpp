#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bifwatch/cubical.hpp"
#include "bifwatch/rng.hpp"

namespace bifwatch {

// Box that contains every original and generated PPD point.
struct Domain {
  double birth_min = 0.0;
  double birth_max = 1.0;
  double lifetime_min = 0.0;
  double lifetime_max = 1.0;

  // Birth in [0, 1], lifetime in [0, 1.5 * max observed lifetime].
  static Domain for_ppd(const Ppd& ppd);

  bool contains(const PpdPoint& p) const noexcept;
  double area() const noexcept {
    return (birth_max - birth_min) * (lifetime_max - lifetime_min);
  }
  PpdPoint center() const noexcept {
    return {(birth_min + birth_max) / 2.0, (lifetime_min + lifetime_max) / 2.0};
  }
  PpdPoint sample_uniform(Rng& rng) const;
  friend bool operator==(const Domain&, const Domain&) = default;
};

double distance(const PpdPoint& a, const PpdPoint& b) noexcept;

// Median over points of the distance to the nearest other point.
double median_nearest_neighbor(std::span<const PpdPoint> points);

// Number of points within distance r of u, skipping index `skip`.
std::size_t count_within(const PpdPoint& u, std::span<const PpdPoint> points,
                         double r, std::size_t skip = static_cast<std::size_t>(-1));

// Type-7 (linear interpolation) sample quantile; `values` need not be sorted.
double quantile(std::vector<double> values, double prob);

// Product-Gaussian KDE on a set of PPD points, renormalized to unit mass
// over a Domain. A uniform density over the Domain is also representable.
class PointDensity {
 public:
  static PointDensity uniform(const Domain& domain);
  static PointDensity kde(std::span<const PpdPoint> points, const Domain& domain);

  double log_value(const PpdPoint& u) const;
  double value(const PpdPoint& u) const;
  bool is_uniform() const noexcept { return uniform_; }
  double bandwidth_birth() const noexcept { return bw_birth_; }
  double bandwidth_lifetime() const noexcept { return bw_lifetime_; }
  const std::vector<PpdPoint>& centers() const noexcept { return centers_; }

 private:
  bool uniform_ = true;
  Domain domain_;
  std::vector<PpdPoint> centers_;
  double bw_birth_ = 0.0;
  double bw_lifetime_ = 0.0;
  double log_norm_ = 0.0;
};

struct Polygon {
  std::vector<PpdPoint> vertices;  // counter-clockwise, convex

  double area() const noexcept;
  bool contains(const PpdPoint& p) const noexcept;
  PpdPoint sample_uniform(Rng& rng) const;
};

// Voronoi cells of `sites` clipped to the domain box. Coincident sites get
// identical cells.
std::vector<Polygon> clipped_voronoi(std::span<const PpdPoint> sites,
                                     const Domain& domain);

// True when the points span no area (all on one line, or fewer than 3 distinct).
bool is_degenerate_configuration(std::span<const PpdPoint> points);

// Ridge-penalized logistic regression fitted by Newton iterations.
// Row i of `features` holds the covariates; an intercept is added and left
// unpenalized. Returns {intercept, coefficients...}.
std::vector<double> fit_logistic(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels,
                                 double ridge = 0.1);

}  // namespace bifwatch
