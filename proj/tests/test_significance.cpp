#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "bifwatch/error.hpp"
#include "bifwatch/significance.hpp"
#include "oracles.hpp"

using namespace bifwatch;

namespace {

Ppd noisy_ppd(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> b(0.05, 0.6);
  std::exponential_distribution<double> l(30.0);
  Ppd p;
  for (std::size_t i = 0; i < n; ++i) p.points.push_back({b(rng), std::min(0.4, l(rng))});
  return p;
}

Ensemble with_replicates(std::vector<Ppd> reps, std::uint64_t seed = 1) {
  Ensemble e;
  e.seed = seed;
  e.replicates = std::move(reps);
  return e;
}

}  // namespace

TEST_SUITE("significance") {

TEST_CASE("detector names") {
  CHECK(parse_detector("mahalanobis") == DetectorKind::Mahalanobis);
  CHECK(parse_detector("bootstrap") == DetectorKind::Bootstrap);
  CHECK_THROWS_AS(parse_detector("md"), Error);
}

TEST_CASE("mahalanobis examples") {
  Ppd square{0, {{0.2, 0.2}, {0.4, 0.2}, {0.2, 0.4}, {0.4, 0.4}}};
  CHECK(mahalanobis_significant(square).significant.empty());
  CHECK(mahalanobis_significant(Ppd{0, {{0.1, 0.1}, {0.9, 0.9}}}).degenerate);
  CHECK(mahalanobis_significant(Ppd{0, {{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}}}).degenerate);

  Rng rng = make_rng(5);
  std::normal_distribution<double> z(0, 0.01);
  Ppd cluster;
  for (int i = 0; i < 30; ++i) cluster.points.push_back({0.2 + z(rng), 0.02 + std::abs(z(rng))});
  cluster.points.push_back({0.9, 0.6});
  auto v = mahalanobis_significant(cluster);
  CHECK(v.significant == std::vector<std::size_t>{30});
  // threshold from an independent computation
  auto md = oracle::mahalanobis(cluster);
  double m = 0, s = 0;
  for (double d : md) m += d;
  m /= md.size();
  for (double d : md) s += (d - m) * (d - m);
  CHECK(v.threshold == doctest::Approx(m + 3 * std::sqrt(s / (md.size() - 1))));
}

TEST_CASE("mahalanobis affine invariance") {
  Rng rng = make_rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = noisy_ppd(15 + trial, 100 + trial);
    p.points.push_back({0.95, 0.7});
    auto base = mahalanobis_significant(p).significant;
    double a, b, c, d;
    do {
      a = u(rng); b = u(rng); c = u(rng); d = u(rng);
    } while (std::abs(a * d - b * c) < 0.2);
    double tx = u(rng), ty = u(rng);
    Ppd q = p;
    for (auto& pt : q.points)
      pt = {a * pt.birth + b * pt.lifetime + tx, c * pt.birth + d * pt.lifetime + ty};
    CHECK(mahalanobis_significant(q).significant == base);
  }
}

TEST_CASE("bootstrap examples") {
  Ppd flat{0, std::vector<PpdPoint>(10, {0.5, 0.2})};
  auto v = bootstrap_significant(flat, 0.05, 200, 1);
  CHECK(v.threshold == 0.2);
  CHECK(v.significant.empty());

  Ppd p;
  for (int i = 0; i < 30; ++i) p.points.push_back({0.1 + 0.01 * i, 0.01});
  p.points.push_back({0.95, 0.5});
  auto w = bootstrap_significant(p, 0.05, 1000, 3);
  CHECK(w.threshold > 0.01);
  CHECK(w.threshold < 0.5);
  CHECK(w.significant == std::vector<std::size_t>{30});
  auto again = bootstrap_significant(p, 0.05, 1000, 3);
  CHECK(again.threshold == w.threshold);
  CHECK_THROWS_AS(bootstrap_significant(Ppd{}, 0.05, 10, 1), Error);
  CHECK_THROWS_AS(bootstrap_significant(p, 1.5, 10, 1), Error);
  CHECK(detect(Ppd{}, Detector{DetectorKind::Bootstrap}, 1).degenerate);
}

TEST_CASE("bootstrap monotone in a point's lifetime") {
  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = noisy_ppd(20, 500 + trial);
    auto v = bootstrap_significant(p, 0.05, 300, trial);
    for (auto i : v.significant) {
      Ppd q = p;
      q.points[i].lifetime += 0.3 * u(rng);
      auto w = bootstrap_significant(q, 0.05, 300, trial);
      CHECK(std::find(w.significant.begin(), w.significant.end(), i) != w.significant.end());
    }
  }
}

TEST_CASE("rank distribution counting") {
  // one clear outlier among noise gives rank 1 under both detectors
  auto base = noisy_ppd(25, 3);
  base.points.push_back({0.95, 0.8});
  auto two = base;
  two.points.push_back({0.9, 0.75});
  auto none = Ppd{0, std::vector<PpdPoint>(5, {0.4, 0.1})};
  Detector boot{DetectorKind::Bootstrap, 0.05, 200};

  auto single = with_replicates({base, base, base});
  CHECK(rank_distribution(single, Detector{}).at(1) == 1.0);

  // detector-free counting: ranks 0,0,1,2 through the Mahalanobis rule
  Ppd r1 = base;
  Ppd r2 = noisy_ppd(40, 9);
  r2.points.push_back({0.95, 0.8});
  r2.points.push_back({0.05, 0.8});
  REQUIRE(mahalanobis_significant(r2).significant.size() == 2);
  auto four = with_replicates({none, none, r1, r2});
  auto d = rank_distribution(four, Detector{});
  CHECK(d.probabilities.size() == 3);
  CHECK(d.at(0) == 0.5);
  CHECK(d.at(1) == 0.25);
  CHECK(d.at(2) == 0.25);
  CHECK(d.at_least(1) == 0.5);

  auto mixed = with_replicates({base, two, none, base, two, none, base});
  for (auto det : {Detector{}, boot}) {
    auto a = rank_distribution(mixed, det);
    double total = 0;
    for (auto& [k, pr] : a.probabilities) total += pr;
    CHECK(total == doctest::Approx(1.0));
    auto s = rank_distribution_serial(mixed, det);
    CHECK(a.probabilities == s.probabilities);
    auto rev = mixed;
    std::reverse(rev.replicates.begin(), rev.replicates.end());
    CHECK(rank_distribution(rev, det).probabilities == a.probabilities);
  }
  CHECK_THROWS_AS(rank_distribution(with_replicates({}), Detector{}), Error);
}

TEST_CASE("coincident significant points count once") {
  Ppd dup;
  for (int i = 0; i < 30; ++i) dup.points.push_back({0.1 + 0.01 * i, 0.01});
  dup.points.push_back({0.95, 0.5});
  dup.points.push_back({0.95, 0.5});
  Detector boot{DetectorKind::Bootstrap, 0.05, 300};
  REQUIRE(bootstrap_significant(dup, 0.05, 300, 1).significant.size() == 2);
  CHECK(rank_distribution(with_replicates({dup}), boot).at(1) == 1.0);
}

}  // TEST_SUITE
