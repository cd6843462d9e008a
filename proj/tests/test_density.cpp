#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "bifwatch/density.hpp"
#include "bifwatch/error.hpp"
#include "bifwatch/rng.hpp"

using namespace bifwatch;

namespace {

GridSpec box(double lo, double hi, std::size_t n) {
  return {lo, hi, lo, hi, n, n};
}

std::vector<State> normal_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z;
  std::vector<State> s(n);
  for (auto& p : s) p = {z(rng), z(rng)};
  return s;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("silverman bandwidth") {
  std::vector<State> s{{0, 0}, {1, 2}, {2, 4}, {3, 6}};
  auto bw = silverman_bandwidth(s);
  double sd = std::sqrt(5.0 / 3.0);
  CHECK(bw.x == doctest::Approx(1.06 * sd * std::pow(4.0, -0.2)));
  CHECK(bw.v == doctest::Approx(2 * bw.x));
  std::vector<State> flat{{1, 0}, {1, 1}, {1, 2}};
  CHECK_THROWS_AS(silverman_bandwidth(flat), Error);
}

TEST_CASE("default grid bounds") {
  std::vector<State> s{{-1, 2}, {3, 5}};
  auto g = default_grid(s, {0.5, 0.25}, 10, 20);
  CHECK(g.x_min == doctest::Approx(-2.5));
  CHECK(g.x_max == doctest::Approx(4.5));
  CHECK(g.v_min == doctest::Approx(1.25));
  CHECK(g.v_max == doctest::Approx(5.75));
  CHECK(g.nx == 10);
  CHECK(g.nv == 20);
}

TEST_CASE("errors") {
  std::vector<State> none;
  CHECK_THROWS_AS(estimate_kde(none, box(0, 1, 4)), Error);
  std::vector<State> one{{0.5, 0.5}};
  CHECK_THROWS_AS(estimate_kde(one, box(0, 1, 4)), Error);  // zero spread
  CHECK_NOTHROW(estimate_kde(one, box(0, 1, 4), Bandwidth{0.1, 0.1}));
  GridSpec bad = box(1, 0, 4);
  CHECK_THROWS_AS(estimate_kde(one, bad, Bandwidth{0.1, 0.1}), Error);
  DensityGrid zero{box(0, 1, 2), {0, 0, 0, 0}};
  CHECK_THROWS_AS(unit_normalize(zero), Error);
}

TEST_CASE("single sample peaks at its cell") {
  auto spec = box(0, 1, 10);
  std::vector<State> one{{spec.x_center(3), spec.v_center(6)}};
  auto g = estimate_kde(one, spec, Bandwidth{0.1, 0.1});
  CHECK(g.at(3, 6) == g.max_value());
}

TEST_CASE("mirror symmetry") {
  std::vector<State> s{{-1, 0}, {1, 0}};
  auto spec = box(-3, 3, 15);
  auto g = estimate_kde(s, spec, Bandwidth{0.5, 0.5});
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 15; ++j)
      CHECK(g.at(i, j) == doctest::Approx(g.at(14 - i, j)).epsilon(1e-12));
}

TEST_CASE("standard normal against closed form") {
  auto s = normal_cloud(100000, 3);
  auto spec = box(-3, 3, 32);
  auto g = estimate_kde(s, spec);
  double worst = 0;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) {
      double x = spec.x_center(i), v = spec.v_center(j);
      double f = std::exp(-(x * x + v * v) / 2) / (2 * std::numbers::pi);
      worst = std::max(worst, std::abs(g.at(i, j) - f));
    }
  CHECK(worst <= 0.05);
}

TEST_CASE("parallel matches serial reference") {
  auto s = normal_cloud(5000, 11);
  auto bw = silverman_bandwidth(s);
  auto spec = default_grid(s, bw, 40, 24);
  auto a = estimate_kde(s, spec);
  auto b = estimate_kde_serial(s, spec);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t k = 0; k < a.values.size(); ++k)
    CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-12));
}

TEST_CASE("non-negative and translation equivariant") {
  auto s = normal_cloud(2000, 5);
  auto spec = box(-4, 4, 20);
  Bandwidth bw{0.3, 0.2};
  auto a = estimate_kde(s, spec, bw);
  for (double v : a.values) CHECK(v >= 0);
  const double dx = 1.25, dv = -0.75;
  auto moved = s;
  for (auto& p : moved) p = {p.x + dx, p.v + dv};
  GridSpec ms = spec;
  ms.x_min += dx;
  ms.x_max += dx;
  ms.v_min += dv;
  ms.v_max += dv;
  auto b = estimate_kde(moved, ms, bw);
  for (std::size_t k = 0; k < a.values.size(); ++k)
    CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-9));
}

TEST_CASE("unit normalize") {
  DensityGrid g{box(0, 1, 2), {2, 1, 0.5, 0}};
  auto n = unit_normalize(g);
  CHECK(n.values == std::vector<double>{1, 0.5, 0.25, 0});
  CHECK(unit_normalize(n).values == n.values);
  DensityGrid c{box(0, 1, 2), {0.3, 0.3, 0.3, 0.3}};
  for (double v : unit_normalize(c).values) CHECK(v == 1.0);
}

}  // TEST_SUITE
