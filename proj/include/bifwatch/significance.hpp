#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bifwatch/replicate.hpp"

namespace bifwatch {

enum class DetectorKind { Mahalanobis, Bootstrap };

const char* to_string(DetectorKind kind);
DetectorKind parse_detector(const std::string& name);

struct SignificanceVerdict {
  std::string method;
  double threshold = 0.0;
  std::vector<std::size_t> significant;
  // Too few points or zero spread: nothing can be called significant.
  bool degenerate = false;
};

struct Detector {
  DetectorKind kind = DetectorKind::Mahalanobis;
  double alpha = 0.05;
  std::size_t resamples = 1000;
};

// Points whose Mahalanobis distance to the (birth, lifetime) cloud exceeds
// mean + 3 sd of all such distances.
SignificanceVerdict mahalanobis_significant(const Ppd& ppd);

// Lifetimes above the mean (1 - alpha) quantile of B bootstrap resamples.
SignificanceVerdict bootstrap_significant(const Ppd& ppd, double alpha = 0.05,
                                          std::size_t resamples = 1000,
                                          std::uint64_t seed = 0);

SignificanceVerdict detect(const Ppd& ppd, const Detector& detector, std::uint64_t seed);

struct RankDistribution {
  int dim = 0;
  std::map<std::size_t, double> probabilities;

  double at(std::size_t rank) const;
  double at_least(std::size_t rank) const;
};

// Fraction of replicates with exactly k distinct significant points
// (coincident duplicates count once). Replicates are scored in parallel; each
// draws from a stream keyed on the ensemble seed and its own contents, so the
// result depends neither on thread count nor on replicate order.
RankDistribution rank_distribution(const Ensemble& ens, const Detector& detector);

// Sequential reference of rank_distribution.
RankDistribution rank_distribution_serial(const Ensemble& ens, const Detector& detector);

}  // namespace bifwatch
