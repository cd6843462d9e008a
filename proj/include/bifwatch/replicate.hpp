#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bifwatch/point_pattern.hpp"

namespace bifwatch {

enum class ReplicationMethod { Gibbs, Pipp, Subsample };

const char* to_string(ReplicationMethod method);
ReplicationMethod parse_replication_method(const std::string& name);

// Global KDE term times exp(theta * neighbours within radius).
struct GibbsModel {
  Domain domain;
  PointDensity global = PointDensity::uniform(Domain{});
  double radius = 0.0;
  double theta = 0.0;

  // log of the conditional intensity of u given `others` (skip index excluded).
  double log_intensity(const PpdPoint& u, std::span<const PpdPoint> others,
                       std::size_t skip = static_cast<std::size_t>(-1)) const;
};

// Piecewise-constant Voronoi intensity times piecewise-constant pairwise
// interaction over distance brackets (0, r1], (r1, r2], ...
struct PippModel {
  Domain domain;
  std::vector<PpdPoint> sites;
  std::vector<Polygon> cells;
  std::vector<double> beta;  // per site: multiplicity / cell area
  std::vector<double> brackets;
  std::vector<double> phi;
  // Set when the Voronoi fit failed and beta fell back to a constant.
  bool uniform_beta = false;
  double uniform_level = 0.0;

  static PippModel with_uniform_beta(const Domain& domain, double level,
                                     std::vector<double> brackets,
                                     std::vector<double> phi);

  double beta_at(const PpdPoint& u) const;
  // Total mass of beta over the domain.
  double beta_mass() const;
  // Draws from beta / beta_mass(); returns the point and its proposal density.
  PpdPoint sample_beta(Rng& rng, double& density) const;
  double log_intensity(const PpdPoint& u, std::span<const PpdPoint> others,
                       std::size_t skip = static_cast<std::size_t>(-1)) const;
};

struct GibbsParams {
  std::size_t burn_in_sweeps = 200;
  std::size_t thin_sweeps = 10;
  // <= 0 means radius / 2.
  double proposal_sigma = 0.0;
};

struct PippParams {
  std::size_t burn_in_sweeps = 200;
  std::size_t thin_sweeps = 10;
  double p_birth = 0.35;
  double p_death = 0.35;
  double p_move = 0.3;
  // <= 0 means half the median nearest-neighbour distance.
  double proposal_sigma = 0.0;
};

struct Ensemble {
  std::string method;
  std::uint64_t seed = 0;
  int dim = 0;
  Domain domain;
  std::map<std::string, double> params;
  std::vector<Ppd> replicates;
};

// Logistic pseudo-likelihood fit with 4 n uniform dummy points.
GibbsModel fit_gibbs(const Ppd& ppd, std::uint64_t seed = 0);

// Fixed-cardinality Metropolis-Hastings; one sweep is |ppd| single-point moves.
Ensemble sample_gibbs(const GibbsModel& model, const Ppd& ppd, std::size_t n,
                      const GibbsParams& mcmc, std::uint64_t seed);

// Interaction values are capped at 1 so that the fitted process is stable.
PippModel fit_pipp(const Ppd& ppd, std::uint64_t seed = 0);

// Birth/death/move reversible-jump chain; cardinality never drops below 1.
Ensemble sample_pipp(const PippModel& model, const Ppd& ppd, std::size_t n,
                     const PippParams& mcmc, std::uint64_t seed);

// Bootstrap: |ppd| draws with replacement per replicate. Replicate r uses its
// own stream derived from (seed, r) and replicates are built in parallel.
Ensemble sample_subsample(const Ppd& ppd, std::size_t n, std::uint64_t seed);

struct ReplicationSettings {
  ReplicationMethod method = ReplicationMethod::Subsample;
  std::size_t replicates = 500;
  GibbsParams gibbs;
  PippParams pipp;
};

// Fits whatever model the method needs and samples an ensemble.
Ensemble replicate(const Ppd& ppd, const ReplicationSettings& settings,
                   std::uint64_t seed);

}  // namespace bifwatch
