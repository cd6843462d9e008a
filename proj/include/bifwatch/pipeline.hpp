#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bifwatch/cubical.hpp"
#include "bifwatch/density.hpp"
#include "bifwatch/sde.hpp"
#include "bifwatch/significance.hpp"

namespace bifwatch {

enum class SystemKind { Duffing, Rvdp, Quintic };

const char* to_string(SystemKind kind);
SystemKind parse_system(const std::string& name);

struct SystemParams {
  SystemKind kind = SystemKind::Duffing;
  double h = 0.0;
  double a = 0.0;
  double q1 = 0.3;
  double d11 = 0.1;
  double d22 = 0.1;

  // Returns a copy with the named parameter ("h", "a", "q1", "d11", "d22") set.
  SystemParams with(const std::string& name, double value) const;
};

SystemDef make_system(const SystemParams& params);

struct GridPolicy {
  std::size_t nx = 64;
  std::size_t nv = 64;
  // Silverman's rule when absent.
  std::optional<Bandwidth> bandwidth;
};

struct GridAnalysis {
  DensityGrid grid;  // unit-normalized
  PersistenceDiagram diagram;
  Ppd h0;
  Ppd h1;

  const Ppd& ppd(int dim) const { return dim == 0 ? h0 : h1; }
};

struct SingleRun {
  Trajectory trajectory;
  GridAnalysis analysis;
};

// Normalize, compute superlevel persistence and project both dimensions.
GridAnalysis analyze_grid(const DensityGrid& grid);

// simulate -> KDE -> normalize -> persistence -> PPDs. Errors are rethrown
// as StageError carrying the failing stage.
SingleRun run_single(const SystemParams& system, const SimConfig& sim,
                     const GridPolicy& grid = {});

struct SweepConfig {
  SystemParams system;
  std::string param = "h";
  std::vector<double> values;
  SimConfig sim;  // seed is replaced per parameter point
  GridPolicy grid;
  ReplicationSettings replication;
  Detector detector;
  int dim = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct UnitSeeds {
  std::uint64_t simulation = 0;
  std::uint64_t replication = 0;
};

// Seeds of parameter point `index`, independent of scheduling.
UnitSeeds unit_seeds(std::uint64_t master, std::size_t index) noexcept;

struct SweepRow {
  double param = 0.0;
  int dim = 0;
  std::size_t rank = 0;
  double probability = 0.0;
};

struct SweepFailure {
  double param = 0.0;
  std::string stage;
  std::string message;
};

struct SweepTable {
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
  std::vector<UnitSeeds> seeds;

  // Rank distribution for one parameter value (empty map if it failed).
  RankDistribution at(double param) const;
};

// Parameter points run in parallel; rows are ordered by parameter, then rank.
SweepTable run_sweep(const SweepConfig& cfg);

// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace bifwatch
