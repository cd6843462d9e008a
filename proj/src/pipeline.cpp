#include "bifwatch/pipeline.hpp"

#include <cmath>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

template <typename F>
auto staged(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

struct UnitResult {
  std::optional<RankDistribution> ranks;
  std::optional<SweepFailure> failure;
};

}  // namespace

const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::Duffing: return "duffing";
    case SystemKind::Rvdp: return "rvdp";
    case SystemKind::Quintic: return "quintic";
  }
  return "unknown";
}

SystemKind parse_system(const std::string& name) {
  if (name == "duffing") return SystemKind::Duffing;
  if (name == "rvdp") return SystemKind::Rvdp;
  if (name == "quintic") return SystemKind::Quintic;
  throw Error(ErrorKind::InvalidArgument, "unknown system '" + name + "'");
}

SystemParams SystemParams::with(const std::string& name, double value) const {
  SystemParams out = *this;
  if (name == "h") out.h = value;
  else if (name == "a") out.a = value;
  else if (name == "q1") out.q1 = value;
  else if (name == "d11") out.d11 = value;
  else if (name == "d22") out.d22 = value;
  else throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + name + "'");
  return out;
}

SystemDef make_system(const SystemParams& params) {
  switch (params.kind) {
    case SystemKind::Duffing: return duffing_system(params.h, params.q1);
    case SystemKind::Rvdp: return rvdp_system(params.h, params.q1);
    case SystemKind::Quintic: return quintic_system(params.h, params.a, params.d11, params.d22);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown system");
}

GridAnalysis analyze_grid(const DensityGrid& grid) {
  GridAnalysis out;
  out.grid = staged("normalize", [&] { return unit_normalize(grid); });
  out.diagram = staged("persistence", [&] { return superlevel_persistence(out.grid); });
  out.h0 = project(out.diagram, 0);
  out.h1 = project(out.diagram, 1);
  return out;
}

SingleRun run_single(const SystemParams& system, const SimConfig& sim, const GridPolicy& policy) {
  SingleRun run;
  run.trajectory = staged("simulate", [&] { return integrate(make_system(system), sim); });
  const DensityGrid raw = staged("kde", [&] {
    const std::span<const State> samples(run.trajectory.samples);
    const Bandwidth bw = policy.bandwidth ? *policy.bandwidth : silverman_bandwidth(samples);
    return estimate_kde(samples, default_grid(samples, bw, policy.nx, policy.nv), bw);
  });
  run.analysis = analyze_grid(raw);
  return run;
}

void SweepConfig::validate() const {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one value");
  if (replication.replicates == 0)
    throw Error(ErrorKind::InvalidArgument, "replicate count must be at least 1");
  if (dim != 0 && dim != 1) throw Error(ErrorKind::InvalidArgument, "dim must be 0 or 1");
  system.with(param, values.front());
  SimConfig probe = sim;
  probe.validate();
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "sweep values must be finite");
}

UnitSeeds unit_seeds(std::uint64_t master, std::size_t index) noexcept {
  return {derive_seed(master, index, 1), derive_seed(master, index, 2)};
}

RankDistribution SweepTable::at(double param) const {
  RankDistribution out{config.dim, {}};
  for (const auto& row : rows)
    if (row.param == param) out.probabilities[row.rank] = row.probability;
  return out;
}

SweepTable run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t count = cfg.values.size();
  std::vector<UnitResult> results(count);
  SweepTable table;
  table.config = cfg;
  for (std::size_t i = 0; i < count; ++i) table.seeds.push_back(unit_seeds(cfg.seed, i));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t u = 0; u < static_cast<std::ptrdiff_t>(count); ++u) {
    const auto i = static_cast<std::size_t>(u);
    const double value = cfg.values[i];
    const UnitSeeds seeds = table.seeds[i];
    try {
      SimConfig sim = cfg.sim;
      sim.seed = seeds.simulation;
      const SingleRun run = run_single(cfg.system.with(cfg.param, value), sim, cfg.grid);
      const Ensemble ens = staged("replicate", [&] {
        return replicate(run.analysis.ppd(cfg.dim), cfg.replication, seeds.replication);
      });
      results[i].ranks = staged("detect", [&] { return rank_distribution(ens, cfg.detector); });
    } catch (const StageError& e) {
      results[i].failure = SweepFailure{value, e.stage(), e.what()};
    } catch (const Error& e) {
      results[i].failure = SweepFailure{value, "sweep", e.what()};
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (results[i].failure) {
      table.failures.push_back(*results[i].failure);
      continue;
    }
    for (const auto& [rank, prob] : results[i].ranks->probabilities)
      table.rows.push_back({cfg.values[i], cfg.dim, rank, prob});
  }
  return table;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "linspace needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const auto last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / last;
  out.back() = hi;
  return out;
}

}  // namespace bifwatch
