// Command-line front end: one subcommand per pipeline stage plus the sweep.
#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bifwatch/error.hpp"
#include "bifwatch/io.hpp"
#include "bifwatch/pipeline.hpp"

namespace fs = std::filesystem;
using namespace bifwatch;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw CLI::ValidationError("--range", "expected lo:hi:count");
  try {
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const long count = std::stol(parts[2]);
    if (count < 1) throw CLI::ValidationError("--range", "count must be at least 1");
    return linspace(lo, hi, static_cast<std::size_t>(count));
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--range", "expected lo:hi:count");
  }
}

struct SimFlags {
  std::string system;
  double h = 0.0;
  double a = 0.0;
  double q1 = 0.3;
  double d11 = 0.1;
  double d22 = 0.1;
  SimConfig sim;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f, bool require_system) {
  auto* sys = cmd->add_option("--system", f.system, "duffing | rvdp | quintic")
                  ->check(CLI::IsMember({"duffing", "rvdp", "quintic"}));
  if (require_system) sys->required();
  cmd->add_option("--h", f.h, "bifurcation parameter h")->capture_default_str();
  cmd->add_option("--a", f.a, "quintic parameter a")->capture_default_str();
  cmd->add_option("--q1", f.q1, "additive noise amplitude")->capture_default_str();
  cmd->add_option("--d11", f.d11, "quintic D11")->capture_default_str();
  cmd->add_option("--d22", f.d22, "quintic D22")->capture_default_str();
  cmd->add_option("--dt", f.sim.dt, "time step")->capture_default_str();
  cmd->add_option("--steps", f.sim.n_steps, "total Euler-Maruyama steps")->capture_default_str();
  cmd->add_option("--burn-in", f.sim.burn_in, "discarded leading steps")->capture_default_str();
  cmd->add_option("--stride", f.sim.stride, "keep every k-th step")->capture_default_str();
  cmd->add_option("--x0", f.sim.initial.x, "initial position")->capture_default_str();
  cmd->add_option("--v0", f.sim.initial.v, "initial velocity")->capture_default_str();
}

SystemParams system_params(const SimFlags& f) {
  return SystemParams{parse_system(f.system), f.h, f.a, f.q1, f.d11, f.d22};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence-based detection of P-bifurcations from single realizations"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::version()));
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  std::uint64_t seed = 0;

  // simulate
  SimFlags sim_flags;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "integrate one realization, write t,x,v CSV");
  add_sim_flags(simulate, sim_flags, true);
  simulate->add_option("--seed", seed, "RNG seed")->envname("BIFWATCH_SEED");
  simulate->add_option("--out", sim_out, "output CSV (stdout if omitted)");

  // kde
  std::string kde_in, kde_out;
  std::size_t kde_nx = 64, kde_nv = 64;
  std::vector<double> kde_bw;
  bool kde_raw = false;
  auto* kde = app.add_subcommand("kde", "trajectory CSV -> unit-normalized density grid JSON");
  kde->add_option("--trajectory", kde_in, "trajectory CSV")->required()->check(CLI::ExistingFile);
  kde->add_option("--nx", kde_nx, "cells along x")->capture_default_str()->check(CLI::Range(2, 1 << 14));
  kde->add_option("--nv", kde_nv, "cells along v")->capture_default_str()->check(CLI::Range(2, 1 << 14));
  kde->add_option("--bandwidth", kde_bw, "explicit bandwidth bx,bv")->expected(2)->delimiter(',');
  kde->add_flag("--raw", kde_raw, "skip unit normalization");
  kde->add_option("--out", kde_out, "output JSON (stdout if omitted)");

  // persistence
  std::string pers_in, pers_out;
  auto* persistence = app.add_subcommand("persistence", "grid JSON -> superlevel diagram CSV");
  persistence->add_option("--grid", pers_in, "grid JSON")->required()->check(CLI::ExistingFile);
  persistence->add_option("--out", pers_out, "output CSV (stdout if omitted)");

  // replicate
  std::string rep_in, rep_out, rep_method = "subsample";
  int rep_dim = 0;
  std::size_t rep_count = 500;
  ReplicationSettings rep_settings;
  auto* replicate_cmd = app.add_subcommand("replicate", "diagram CSV -> ensemble JSON");
  replicate_cmd->add_option("--diagram", rep_in, "diagram CSV")->required()->check(CLI::ExistingFile);
  replicate_cmd->add_option("--dim", rep_dim, "homology dimension")->check(CLI::IsMember({0, 1}));
  replicate_cmd->add_option("--method", rep_method, "gibbs | pipp | subsample")
      ->check(CLI::IsMember({"gibbs", "pipp", "subsample"}))->capture_default_str();
  replicate_cmd->add_option("--replicates", rep_count, "ensemble size")
      ->capture_default_str()->check(CLI::PositiveNumber);
  replicate_cmd->add_option("--burn-in-sweeps", rep_settings.gibbs.burn_in_sweeps, "MCMC burn-in sweeps");
  replicate_cmd->add_option("--thin-sweeps", rep_settings.gibbs.thin_sweeps, "MCMC sweeps between replicates")
      ->check(CLI::PositiveNumber);
  replicate_cmd->add_option("--seed", seed, "RNG seed")->envname("BIFWATCH_SEED");
  replicate_cmd->add_option("--out", rep_out, "output JSON (stdout if omitted)");

  // detect
  std::string det_diagram, det_ensemble, det_out, det_kind = "mahalanobis";
  int det_dim = 0;
  Detector detector;
  auto* detect_cmd = app.add_subcommand(
      "detect", "verdict JSON for a diagram, or rank distribution CSV for an ensemble");
  auto* det_d = detect_cmd->add_option("--diagram", det_diagram, "diagram CSV")->check(CLI::ExistingFile);
  auto* det_e = detect_cmd->add_option("--ensemble", det_ensemble, "ensemble JSON")->check(CLI::ExistingFile);
  det_d->excludes(det_e);
  detect_cmd->add_option("--dim", det_dim, "homology dimension for --diagram")->check(CLI::IsMember({0, 1}));
  detect_cmd->add_option("--detector", det_kind, "mahalanobis | bootstrap")
      ->check(CLI::IsMember({"mahalanobis", "bootstrap"}))->capture_default_str();
  detect_cmd->add_option("--alpha", detector.alpha, "bootstrap level")->capture_default_str()
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  detect_cmd->add_option("--resamples", detector.resamples, "bootstrap resamples")
      ->capture_default_str()->check(CLI::PositiveNumber);
  detect_cmd->add_option("--seed", seed, "RNG seed")->envname("BIFWATCH_SEED");
  detect_cmd->add_option("--out", det_out, "output file (stdout if omitted)");

  // sweep
  SimFlags sweep_flags;
  std::string sweep_param = "h", sweep_range = "-1:1:11", sweep_method = "subsample",
              sweep_detector = "mahalanobis", sweep_out, sweep_manifest;
  std::size_t sweep_replicates = 500;
  int sweep_dim = 0;
  GridPolicy sweep_grid;
  Detector sweep_detector_cfg;
  auto* sweep = app.add_subcommand("sweep", "full pipeline over a parameter range");
  sweep->set_config("--config", "", "TOML/INI file with sweep flags (flags override it)");
  add_sim_flags(sweep, sweep_flags, false);
  sweep->add_option("--param", sweep_param, "swept parameter")
      ->check(CLI::IsMember({"h", "a", "q1", "d11", "d22"}))->capture_default_str();
  sweep->add_option("--range", sweep_range, "lo:hi:count")->capture_default_str();
  sweep->add_option("--method", sweep_method, "gibbs | pipp | subsample")
      ->check(CLI::IsMember({"gibbs", "pipp", "subsample"}))->capture_default_str();
  sweep->add_option("--detector", sweep_detector, "mahalanobis | bootstrap")
      ->check(CLI::IsMember({"mahalanobis", "bootstrap"}))->capture_default_str();
  sweep->add_option("--alpha", sweep_detector_cfg.alpha, "bootstrap level")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--resamples", sweep_detector_cfg.resamples, "bootstrap resamples")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--replicates", sweep_replicates, "ensemble size per point")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--dim", sweep_dim, "homology dimension to replicate")
      ->check(CLI::IsMember({0, 1}))->capture_default_str();
  sweep->add_option("--nx", sweep_grid.nx, "KDE cells along x")->capture_default_str()
      ->check(CLI::Range(2, 1 << 14));
  sweep->add_option("--nv", sweep_grid.nv, "KDE cells along v")->capture_default_str()
      ->check(CLI::Range(2, 1 << 14));
  sweep->add_option("--seed", seed, "master seed")->envname("BIFWATCH_SEED");
  sweep->add_option("--manifest", sweep_manifest, "re-run the config recorded in a manifest")
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*simulate) {
      SimConfig sim = sim_flags.sim;
      sim.seed = seed;
      const Trajectory traj = integrate(make_system(system_params(sim_flags)), sim);
      std::ostringstream out;
      io::write_trajectory_csv(out, traj);
      emit(sim_out, out.str());
    } else if (*kde) {
      std::istringstream in(io::read_text(kde_in));
      const auto samples = io::read_trajectory_csv(in);
      std::optional<Bandwidth> bw;
      if (!kde_bw.empty()) bw = Bandwidth{kde_bw[0], kde_bw[1]};
      const Bandwidth used = bw ? *bw : silverman_bandwidth(samples);
      DensityGrid grid = estimate_kde(samples, default_grid(samples, used, kde_nx, kde_nv), used);
      if (!kde_raw) grid = unit_normalize(grid);
      emit(kde_out, io::grid_to_json(grid).dump() + "\n");
    } else if (*persistence) {
      const DensityGrid grid = io::grid_from_json(io::read_json(pers_in));
      std::ostringstream out;
      io::write_diagram_csv(out, superlevel_persistence(grid));
      emit(pers_out, out.str());
    } else if (*replicate_cmd) {
      std::istringstream in(io::read_text(rep_in));
      const Ppd ppd = project(io::read_diagram_csv(in), rep_dim);
      rep_settings.method = parse_replication_method(rep_method);
      rep_settings.replicates = rep_count;
      rep_settings.pipp.burn_in_sweeps = rep_settings.gibbs.burn_in_sweeps;
      rep_settings.pipp.thin_sweeps = rep_settings.gibbs.thin_sweeps;
      emit(rep_out, io::ensemble_to_json(replicate(ppd, rep_settings, seed)).dump() + "\n");
    } else if (*detect_cmd) {
      detector.kind = parse_detector(det_kind);
      if (!det_diagram.empty()) {
        std::istringstream in(io::read_text(det_diagram));
        const Ppd ppd = project(io::read_diagram_csv(in), det_dim);
        emit(det_out, io::verdict_to_json(detect(ppd, detector, seed)).dump(2) + "\n");
      } else if (!det_ensemble.empty()) {
        const Ensemble ens = io::ensemble_from_json(io::read_json(det_ensemble));
        std::ostringstream out;
        io::write_rank_csv(out, rank_distribution(ens, detector));
        emit(det_out, out.str());
      } else {
        std::cerr << "detect: one of --diagram or --ensemble is required\n"
                  << detect_cmd->help();
        return kExitUsage;
      }
    } else if (*sweep) {
      SweepConfig cfg;
      if (!sweep_manifest.empty()) {
        cfg = io::config_from_manifest(io::read_json(sweep_manifest));
      } else {
        if (sweep_flags.system.empty()) {
          std::cerr << "sweep: --system is required\n" << sweep->help();
          return kExitUsage;
        }
        cfg.system = system_params(sweep_flags);
        cfg.param = sweep_param;
        cfg.values = parse_range(sweep_range);
        cfg.sim = sweep_flags.sim;
        cfg.grid = sweep_grid;
        cfg.replication.method = parse_replication_method(sweep_method);
        cfg.replication.replicates = sweep_replicates;
        cfg.detector = sweep_detector_cfg;
        cfg.detector.kind = parse_detector(sweep_detector);
        cfg.dim = sweep_dim;
        cfg.seed = seed;
      }
      const SweepTable table = run_sweep(cfg);
      fs::create_directories(sweep_out);
      std::ostringstream csv;
      io::write_sweep_csv(csv, table);
      io::write_text(fs::path(sweep_out) / "sweep.csv", csv.str());
      io::write_json(fs::path(sweep_out) / "manifest.json", io::manifest_to_json(table));
      for (const auto& f : table.failures)
        std::cerr << "warning: param " << f.param << " failed at " << f.stage << ": "
                  << f.message << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidArgument:
      case ErrorKind::Io:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
