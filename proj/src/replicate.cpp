#include "bifwatch/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);
// Keeps log-density covariates finite far away from every PPD point.
constexpr double kLogFloor = -700.0;

double positive_radius(std::span<const PpdPoint> points, const Domain& domain) {
  double r = median_nearest_neighbor(points);
  if (r > 0.0) return r;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = distance(points[i], points[j]);
      if (d > 0.0) smallest = std::min(smallest, d);
    }
  if (std::isfinite(smallest)) return smallest;
  return 1e-3 * std::min(domain.birth_max - domain.birth_min,
                         domain.lifetime_max - domain.lifetime_min);
}

std::size_t sweeps_needed(std::size_t n, std::size_t burn_in, std::size_t thin) {
  return n == 0 ? 0 : burn_in + n * thin;
}

bool is_record_sweep(std::size_t sweep, std::size_t burn_in, std::size_t thin) {
  return sweep > burn_in && (sweep - burn_in) % thin == 0;
}

std::vector<std::size_t> bracket_counts(const PpdPoint& u, std::span<const PpdPoint> others,
                                        const std::vector<double>& brackets,
                                        std::size_t skip) {
  std::vector<std::size_t> counts(brackets.size(), 0);
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (i == skip) continue;
    const double d = distance(u, others[i]);
    auto it = std::lower_bound(brackets.begin(), brackets.end(), d);
    if (it != brackets.end()) ++counts[static_cast<std::size_t>(it - brackets.begin())];
  }
  return counts;
}

}  // namespace

const char* to_string(ReplicationMethod method) {
  switch (method) {
    case ReplicationMethod::Gibbs: return "gibbs";
    case ReplicationMethod::Pipp: return "pipp";
    case ReplicationMethod::Subsample: return "subsample";
  }
  return "unknown";
}

ReplicationMethod parse_replication_method(const std::string& name) {
  if (name == "gibbs") return ReplicationMethod::Gibbs;
  if (name == "pipp") return ReplicationMethod::Pipp;
  if (name == "subsample") return ReplicationMethod::Subsample;
  throw Error(ErrorKind::InvalidArgument, "unknown replication method '" + name + "'");
}

double GibbsModel::log_intensity(const PpdPoint& u, std::span<const PpdPoint> others,
                                 std::size_t skip) const {
  return global.log_value(u) +
         theta * static_cast<double>(count_within(u, others, radius, skip));
}

GibbsModel fit_gibbs(const Ppd& ppd, std::uint64_t seed) {
  if (ppd.size() < 2)
    throw Error(ErrorKind::TooFewPoints, "Gibbs fit needs at least 2 PPD points");
  const std::span<const PpdPoint> pts(ppd.points);
  GibbsModel model;
  model.domain = Domain::for_ppd(ppd);
  model.global = PointDensity::kde(pts, model.domain);
  model.radius = positive_radius(pts, model.domain);

  Rng rng = make_rng(seed);
  const std::size_t n_dummy = 4 * pts.size();
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(pts.size() + n_dummy);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    features.push_back({std::max(kLogFloor, model.global.log_value(pts[i])),
                        static_cast<double>(count_within(pts[i], pts, model.radius, i))});
    labels.push_back(1);
  }
  for (std::size_t k = 0; k < n_dummy; ++k) {
    const PpdPoint u = model.domain.sample_uniform(rng);
    features.push_back({std::max(kLogFloor, model.global.log_value(u)),
                        static_cast<double>(count_within(u, pts, model.radius))});
    labels.push_back(0);
  }
  model.theta = fit_logistic(features, labels)[2];
  return model;
}

Ensemble sample_gibbs(const GibbsModel& model, const Ppd& ppd, std::size_t n,
                      const GibbsParams& mcmc, std::uint64_t seed) {
  if (mcmc.thin_sweeps == 0)
    throw Error(ErrorKind::InvalidArgument, "thin_sweeps must be at least 1");
  const double sigma = mcmc.proposal_sigma > 0.0 ? mcmc.proposal_sigma : model.radius / 2.0;
  Ensemble ens;
  ens.method = to_string(ReplicationMethod::Gibbs);
  ens.seed = seed;
  ens.dim = ppd.dim;
  ens.domain = model.domain;
  ens.params = {{"burn_in_sweeps", static_cast<double>(mcmc.burn_in_sweeps)},
                {"thin_sweeps", static_cast<double>(mcmc.thin_sweeps)},
                {"proposal_sigma", sigma},
                {"radius", model.radius},
                {"theta", model.theta}};
  if (n == 0 || ppd.empty()) {
    ens.replicates.assign(n, Ppd{ppd.dim, {}});
    return ens;
  }
  ens.replicates.reserve(n);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> step(0.0, sigma);
  std::uniform_int_distribution<std::size_t> pick(0, ppd.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<PpdPoint> state = ppd.points;
  const std::size_t total = sweeps_needed(n, mcmc.burn_in_sweeps, mcmc.thin_sweeps);
  for (std::size_t sweep = 1; sweep <= total; ++sweep) {
    for (std::size_t move = 0; move < state.size(); ++move) {
      const std::size_t idx = pick(rng);
      const PpdPoint current = state[idx];
      const double db = step(rng);
      const double dl = step(rng);
      const double log_u = std::log(unit(rng));
      const PpdPoint proposal{current.birth + db, current.lifetime + dl};
      if (!model.domain.contains(proposal)) continue;
      const double log_ratio = model.log_intensity(proposal, state, idx) -
                               model.log_intensity(current, state, idx);
      if (log_u < log_ratio) state[idx] = proposal;
    }
    if (is_record_sweep(sweep, mcmc.burn_in_sweeps, mcmc.thin_sweeps))
      ens.replicates.push_back(Ppd{ppd.dim, state});
  }
  return ens;
}

PippModel PippModel::with_uniform_beta(const Domain& domain, double level,
                                       std::vector<double> brackets,
                                       std::vector<double> phi) {
  if (brackets.size() != phi.size())
    throw Error(ErrorKind::InvalidArgument, "one interaction value per bracket");
  PippModel model;
  model.domain = domain;
  model.uniform_beta = true;
  model.uniform_level = level;
  model.brackets = std::move(brackets);
  model.phi = std::move(phi);
  return model;
}

double PippModel::beta_at(const PpdPoint& u) const {
  if (!domain.contains(u)) return 0.0;
  if (uniform_beta) return uniform_level;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double d = distance(u, sites[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return beta[best];
}

double PippModel::beta_mass() const {
  if (uniform_beta) return uniform_level * domain.area();
  // Each site's share of its (possibly shared) cell integrates to one.
  return static_cast<double>(sites.size());
}

PpdPoint PippModel::sample_beta(Rng& rng, double& density) const {
  PpdPoint u;
  if (uniform_beta) {
    u = domain.sample_uniform(rng);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, sites.size() - 1);
    u = cells[pick(rng)].sample_uniform(rng);
  }
  density = beta_at(u) / beta_mass();
  return u;
}

double PippModel::log_intensity(const PpdPoint& u, std::span<const PpdPoint> others,
                                std::size_t skip) const {
  const double b = beta_at(u);
  if (!(b > 0.0)) return -std::numeric_limits<double>::infinity();
  double out = std::log(b);
  const auto counts = bracket_counts(u, others, brackets, skip);
  for (std::size_t k = 0; k < counts.size(); ++k)
    out += static_cast<double>(counts[k]) * std::log(phi[k]);
  return out;
}

PippModel fit_pipp(const Ppd& ppd, std::uint64_t seed) {
  if (ppd.size() < 3)
    throw Error(ErrorKind::TooFewPoints, "PIPP fit needs at least 3 PPD points");
  const std::span<const PpdPoint> pts(ppd.points);
  PippModel model;
  model.domain = Domain::for_ppd(ppd);
  model.sites = ppd.points;

  if (is_degenerate_configuration(pts)) {
    model.uniform_beta = true;
    model.uniform_level = static_cast<double>(pts.size()) / model.domain.area();
  } else {
    model.cells = clipped_voronoi(pts, model.domain);
    model.beta.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto mult = static_cast<double>(std::count(pts.begin(), pts.end(), pts[i]));
      const double area = model.cells[i].area();
      if (!(area > 0.0)) {
        model.uniform_beta = true;
        model.uniform_level = static_cast<double>(pts.size()) / model.domain.area();
        model.cells.clear();
        model.beta.clear();
        break;
      }
      model.beta[i] = mult / area;
    }
  }

  // Brackets: quantiles of the pairwise distances that do not exceed the median.
  std::vector<double> pairwise;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) pairwise.push_back(distance(pts[i], pts[j]));
  const double median = quantile(pairwise, 0.5);
  std::vector<double> lower;
  for (double d : pairwise)
    if (d <= median) lower.push_back(d);
  for (double prob : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double q = quantile(lower, prob);
    if (q > 0.0 && (model.brackets.empty() || q > model.brackets.back()))
      model.brackets.push_back(q);
  }
  if (model.brackets.empty()) model.brackets.push_back(positive_radius(pts, model.domain));

  Rng rng = make_rng(seed);
  const std::size_t n_dummy = 4 * pts.size();
  const bool use_beta = !model.uniform_beta;
  auto row_for = [&](const PpdPoint& u, std::size_t skip) {
    std::vector<double> row;
    if (use_beta) row.push_back(std::log(model.beta_at(u)));
    for (auto c : bracket_counts(u, pts, model.brackets, skip))
      row.push_back(static_cast<double>(c));
    return row;
  };
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    features.push_back(row_for(pts[i], i));
    labels.push_back(1);
  }
  for (std::size_t k = 0; k < n_dummy; ++k) {
    features.push_back(row_for(model.domain.sample_uniform(rng), kNoSkip));
    labels.push_back(0);
  }
  const auto coef = fit_logistic(features, labels);
  const std::size_t offset = use_beta ? 2 : 1;
  // phi > 1 makes the pairwise process unstable: births snowball without
  // bound. Capped to the inhibitory range.
  for (std::size_t k = 0; k < model.brackets.size(); ++k)
    model.phi.push_back(std::min(1.0, std::exp(coef[offset + k])));
  return model;
}

Ensemble sample_pipp(const PippModel& model, const Ppd& ppd, std::size_t n,
                     const PippParams& mcmc, std::uint64_t seed) {
  const double total_p = mcmc.p_birth + mcmc.p_death + mcmc.p_move;
  if (mcmc.p_birth < 0.0 || mcmc.p_death < 0.0 || mcmc.p_move < 0.0 ||
      std::abs(total_p - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "move probabilities must be non-negative and sum to 1");
  if ((mcmc.p_birth > 0.0) != (mcmc.p_death > 0.0))
    throw Error(ErrorKind::InvalidArgument, "birth and death moves must both be enabled or both off");
  if (mcmc.thin_sweeps == 0)
    throw Error(ErrorKind::InvalidArgument, "thin_sweeps must be at least 1");

  Ensemble ens;
  ens.method = to_string(ReplicationMethod::Pipp);
  ens.seed = seed;
  ens.dim = ppd.dim;
  ens.domain = model.domain;
  if (n == 0 || ppd.empty()) {
    ens.replicates.assign(n, Ppd{ppd.dim, {}});
    return ens;
  }
  double sigma = mcmc.proposal_sigma;
  if (!(sigma > 0.0))
    sigma = ppd.size() >= 2 ? positive_radius(ppd.points, model.domain) / 2.0
                            : 0.05 * (model.domain.lifetime_max - model.domain.lifetime_min);
  ens.params = {{"burn_in_sweeps", static_cast<double>(mcmc.burn_in_sweeps)},
                {"thin_sweeps", static_cast<double>(mcmc.thin_sweeps)},
                {"p_birth", mcmc.p_birth},
                {"p_death", mcmc.p_death},
                {"p_move", mcmc.p_move},
                {"proposal_sigma", sigma}};
  ens.replicates.reserve(n);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> step(0.0, sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_bd = mcmc.p_birth > 0.0 ? std::log(mcmc.p_death / mcmc.p_birth) : 0.0;
  const double mass = model.beta_mass();

  std::vector<PpdPoint> state = ppd.points;
  const std::size_t steps_per_sweep = ppd.size();
  const std::size_t total = sweeps_needed(n, mcmc.burn_in_sweeps, mcmc.thin_sweeps);
  for (std::size_t sweep = 1; sweep <= total; ++sweep) {
    for (std::size_t s = 0; s < steps_per_sweep; ++s) {
      const double kind = unit(rng);
      if (kind < mcmc.p_birth) {
        double q = 0.0;
        const PpdPoint u = model.sample_beta(rng, q);
        const double log_u = std::log(unit(rng));
        const double log_ratio = log_bd + model.log_intensity(u, state) -
                                 std::log(static_cast<double>(state.size() + 1)) - std::log(q);
        if (log_u < log_ratio) state.push_back(u);
      } else if (kind < mcmc.p_birth + mcmc.p_death) {
        std::uniform_int_distribution<std::size_t> pick(0, state.size() - 1);
        const std::size_t idx = pick(rng);
        const double log_u = std::log(unit(rng));
        if (state.size() <= 1) continue;
        const PpdPoint u = state[idx];
        const double q = model.beta_at(u) / mass;
        const double log_ratio = -log_bd + std::log(static_cast<double>(state.size())) +
                                 std::log(q) - model.log_intensity(u, state, idx);
        if (log_u < log_ratio) state.erase(state.begin() + static_cast<std::ptrdiff_t>(idx));
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, state.size() - 1);
        const std::size_t idx = pick(rng);
        const PpdPoint current = state[idx];
        const PpdPoint proposal{current.birth + step(rng), current.lifetime + step(rng)};
        const double log_u = std::log(unit(rng));
        if (!model.domain.contains(proposal)) continue;
        const double log_ratio = model.log_intensity(proposal, state, idx) -
                                 model.log_intensity(current, state, idx);
        if (log_u < log_ratio) state[idx] = proposal;
      }
    }
    if (is_record_sweep(sweep, mcmc.burn_in_sweeps, mcmc.thin_sweeps))
      ens.replicates.push_back(Ppd{ppd.dim, state});
  }
  return ens;
}

Ensemble sample_subsample(const Ppd& ppd, std::size_t n, std::uint64_t seed) {
  if (ppd.empty()) throw Error(ErrorKind::EmptyPpd, "cannot subsample an empty PPD");
  Ensemble ens;
  ens.method = to_string(ReplicationMethod::Subsample);
  ens.seed = seed;
  ens.dim = ppd.dim;
  ens.domain = Domain::for_ppd(ppd);
  ens.replicates.assign(n, Ppd{ppd.dim, {}});
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<std::size_t> pick(0, ppd.size() - 1);
    auto& points = ens.replicates[static_cast<std::size_t>(r)].points;
    points.reserve(ppd.size());
    for (std::size_t k = 0; k < ppd.size(); ++k) points.push_back(ppd.points[pick(rng)]);
  }
  return ens;
}

Ensemble replicate(const Ppd& ppd, const ReplicationSettings& settings, std::uint64_t seed) {
  const std::uint64_t fit_seed = derive_seed(seed, 0, 1);
  // No features observed: every replicate of an empty diagram is empty.
  if (ppd.empty()) {
    Ensemble ens;
    ens.method = to_string(settings.method);
    ens.seed = seed;
    ens.dim = ppd.dim;
    ens.replicates.assign(settings.replicates, Ppd{ppd.dim, {}});
    return ens;
  }
  switch (settings.method) {
    case ReplicationMethod::Gibbs:
      return sample_gibbs(fit_gibbs(ppd, fit_seed), ppd, settings.replicates, settings.gibbs, seed);
    case ReplicationMethod::Pipp:
      return sample_pipp(fit_pipp(ppd, fit_seed), ppd, settings.replicates, settings.pipp, seed);
    case ReplicationMethod::Subsample:
      return sample_subsample(ppd, settings.replicates, seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown replication method");
}

}  // namespace bifwatch
