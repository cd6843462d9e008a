#include "bifwatch/significance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

constexpr double kRegularization = 1e-9;
constexpr double kConditionLimit = 1e12;

// Keyed on the replicate's contents rather than its position so that the
// distribution does not change when replicates are reordered.
std::uint64_t replicate_seed(const Ensemble& ens, const Ppd& replicate) {
  std::uint64_t h = mix64(ens.seed ^ 0x5bd1e995ULL);
  for (const auto& p : replicate.points) {
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p.birth));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p.lifetime));
  }
  return h;
}

// Coincident points (bootstrap duplicates) represent one feature.
std::size_t distinct_significant(const Ppd& ppd, const SignificanceVerdict& verdict) {
  std::vector<PpdPoint> seen;
  for (auto i : verdict.significant) {
    const PpdPoint& p = ppd.points[i];
    if (std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
  }
  return seen.size();
}

std::size_t replicate_rank(const Ensemble& ens, const Ppd& rep, const Detector& detector) {
  return distinct_significant(rep, detect(rep, detector, replicate_seed(ens, rep)));
}

RankDistribution tally(int dim, const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  std::map<std::size_t, std::size_t> counts;
  for (auto k : ranks) ++counts[k];
  RankDistribution out{dim, {}};
  const auto total = static_cast<double>(ranks.size());
  for (const auto& [k, c] : counts) out.probabilities[k] = static_cast<double>(c) / total;
  return out;
}

}  // namespace

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Mahalanobis: return "mahalanobis";
    case DetectorKind::Bootstrap: return "bootstrap";
  }
  return "unknown";
}

DetectorKind parse_detector(const std::string& name) {
  if (name == "mahalanobis") return DetectorKind::Mahalanobis;
  if (name == "bootstrap") return DetectorKind::Bootstrap;
  throw Error(ErrorKind::InvalidArgument, "unknown detector '" + name + "'");
}

SignificanceVerdict mahalanobis_significant(const Ppd& ppd) {
  SignificanceVerdict verdict{to_string(DetectorKind::Mahalanobis), 0.0, {}, false};
  const std::size_t n = ppd.size();
  if (n < 3) {
    verdict.degenerate = true;
    return verdict;
  }
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : ppd.points) mean += Eigen::Vector2d(p.birth, p.lifetime);
  mean /= static_cast<double>(n);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : ppd.points) {
    const Eigen::Vector2d d = Eigen::Vector2d(p.birth, p.lifetime) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n - 1);

  const double trace = cov.trace();
  // Spread at rounding level of the coordinates counts as none.
  const double scale = 1.0 + mean.squaredNorm();
  if (!(trace > 1e-24 * scale) || !std::isfinite(trace)) {
    verdict.degenerate = true;
    return verdict;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (!(lo > 0.0) || hi / lo > kConditionLimit)
    cov += Eigen::Matrix2d::Identity() * (kRegularization * trace / 2.0);
  const Eigen::LDLT<Eigen::Matrix2d> solver(cov);

  std::vector<double> md(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d d =
        Eigen::Vector2d(ppd.points[i].birth, ppd.points[i].lifetime) - mean;
    md[i] = std::sqrt(std::max(0.0, d.dot(solver.solve(d))));
  }
  double md_mean = 0.0;
  for (double m : md) md_mean += m;
  md_mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double m : md) ss += (m - md_mean) * (m - md_mean);
  const double md_sd = std::sqrt(ss / static_cast<double>(n - 1));

  verdict.threshold = md_mean + 3.0 * md_sd;
  for (std::size_t i = 0; i < n; ++i)
    if (md[i] > verdict.threshold) verdict.significant.push_back(i);
  return verdict;
}

SignificanceVerdict bootstrap_significant(const Ppd& ppd, double alpha,
                                          std::size_t resamples, std::uint64_t seed) {
  if (ppd.empty()) throw Error(ErrorKind::EmptyPpd, "bootstrap of an empty PPD");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (resamples == 0) throw Error(ErrorKind::InvalidArgument, "need at least one resample");

  SignificanceVerdict verdict{to_string(DetectorKind::Bootstrap), 0.0, {}, false};
  const std::size_t n = ppd.size();
  std::vector<double> lifetimes(n);
  for (std::size_t i = 0; i < n; ++i) lifetimes[i] = ppd.points[i].lifetime;

  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> resample(n);
  double sum = 0.0;
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& v : resample) v = lifetimes[pick(rng)];
    const double q = quantile(resample, 1.0 - alpha);
    sum += q;
    q_min = std::min(q_min, q);
    q_max = std::max(q_max, q);
  }
  // Rounding in the running sum must not push the mean outside the quantiles.
  verdict.threshold = std::clamp(sum / static_cast<double>(resamples), q_min, q_max);
  for (std::size_t i = 0; i < n; ++i)
    if (lifetimes[i] > verdict.threshold) verdict.significant.push_back(i);
  return verdict;
}

SignificanceVerdict detect(const Ppd& ppd, const Detector& detector, std::uint64_t seed) {
  switch (detector.kind) {
    case DetectorKind::Mahalanobis:
      return mahalanobis_significant(ppd);
    case DetectorKind::Bootstrap:
      if (ppd.empty()) return {to_string(DetectorKind::Bootstrap), 0.0, {}, true};
      return bootstrap_significant(ppd, detector.alpha, detector.resamples, seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown detector");
}

double RankDistribution::at(std::size_t rank) const {
  const auto it = probabilities.find(rank);
  return it == probabilities.end() ? 0.0 : it->second;
}

double RankDistribution::at_least(std::size_t rank) const {
  double total = 0.0;
  for (auto it = probabilities.lower_bound(rank); it != probabilities.end(); ++it)
    total += it->second;
  return total;
}

RankDistribution rank_distribution(const Ensemble& ens, const Detector& detector) {
  std::vector<std::size_t> ranks(ens.replicates.size());
  const auto count = static_cast<std::ptrdiff_t>(ranks.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    ranks[idx] = replicate_rank(ens, ens.replicates[idx], detector);
  }
  return tally(ens.dim, ranks);
}

RankDistribution rank_distribution_serial(const Ensemble& ens, const Detector& detector) {
  std::vector<std::size_t> ranks;
  ranks.reserve(ens.replicates.size());
  for (std::size_t r = 0; r < ens.replicates.size(); ++r)
    ranks.push_back(replicate_rank(ens, ens.replicates[r], detector));
  return tally(ens.dim, ranks);
}

}  // namespace bifwatch
