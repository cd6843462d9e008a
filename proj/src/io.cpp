#include "bifwatch/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bifwatch/error.hpp"

#ifndef BIFWATCH_VERSION
#define BIFWATCH_VERSION "dev"
#endif

namespace bifwatch::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw Error(ErrorKind::Io, "not a number: '" + t + "'");
  return value;
}

// Yields data rows after checking the header; skips blanks and '#' lines.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& header,
                                                std::size_t columns) {
  std::string line;
  bool seen_header = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) throw Error(ErrorKind::Io, "expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    auto fields = split(line);
    if (fields.size() != columns)
      throw Error(ErrorKind::Io, "expected " + std::to_string(columns) + " columns: " + line);
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw Error(ErrorKind::Io, "missing header '" + header + "'");
  return rows;
}

json mcmc_gibbs_json(const GibbsParams& p) {
  return {{"burn_in_sweeps", p.burn_in_sweeps},
          {"thin_sweeps", p.thin_sweeps},
          {"proposal_sigma", p.proposal_sigma}};
}

json mcmc_pipp_json(const PippParams& p) {
  return {{"burn_in_sweeps", p.burn_in_sweeps}, {"thin_sweeps", p.thin_sweeps},
          {"p_birth", p.p_birth},               {"p_death", p.p_death},
          {"p_move", p.p_move},                 {"proposal_sigma", p.proposal_sigma}};
}

}  // namespace

const char* version() noexcept { return BIFWATCH_VERSION; }

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorKind::Io, "cannot format number");
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x,v\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i)
    out << format_double(traj.time_of(i)) << ',' << format_double(traj.samples[i].x) << ','
        << format_double(traj.samples[i].v) << '\n';
}

std::vector<State> read_trajectory_csv(std::istream& in) {
  std::vector<State> samples;
  for (const auto& row : read_rows(in, "t,x,v", 3))
    samples.push_back({parse_double(row[1]), parse_double(row[2])});
  return samples;
}

json grid_to_json(const DensityGrid& grid) {
  return {{"spec",
           {{"x_min", grid.spec.x_min},
            {"x_max", grid.spec.x_max},
            {"v_min", grid.spec.v_min},
            {"v_max", grid.spec.v_max},
            {"nx", grid.spec.nx},
            {"nv", grid.spec.nv}}},
          {"values", grid.values}};
}

DensityGrid grid_from_json(const json& j) {
  try {
    DensityGrid grid;
    const auto& s = j.at("spec");
    grid.spec = GridSpec{s.at("x_min").get<double>(), s.at("x_max").get<double>(),
                         s.at("v_min").get<double>(), s.at("v_max").get<double>(),
                         s.at("nx").get<std::size_t>(), s.at("nv").get<std::size_t>()};
    grid.spec.validate();
    grid.values = j.at("values").get<std::vector<double>>();
    if (grid.values.size() != grid.spec.nx * grid.spec.nv)
      throw Error(ErrorKind::Io, "grid has the wrong number of values");
    return grid;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed grid JSON: ") + e.what());
  }
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd) {
  out << "dim,birth,death\n";
  for (const auto& p : pd.pairs)
    out << p.dim << ',' << format_double(p.birth) << ',' << format_double(p.death) << '\n';
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram pd;
  for (const auto& row : read_rows(in, "dim,birth,death", 3)) {
    const double dim = parse_double(row[0]);
    if (dim != 0.0 && dim != 1.0) throw Error(ErrorKind::Io, "dim must be 0 or 1");
    PersistencePair pair{static_cast<int>(dim), parse_double(row[1]), parse_double(row[2]), false};
    if (pair.birth < pair.death)
      throw Error(ErrorKind::Io, "superlevel pairs need birth >= death");
    pd.pairs.push_back(pair);
  }
  return pd;
}

json ensemble_to_json(const Ensemble& ens) {
  json params = json::object();
  for (const auto& [k, v] : ens.params) params[k] = v;
  params["dim"] = ens.dim;
  params["domain"] = {ens.domain.birth_min, ens.domain.birth_max, ens.domain.lifetime_min,
                      ens.domain.lifetime_max};
  json reps = json::array();
  for (const auto& r : ens.replicates) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back({p.birth, p.lifetime});
    reps.push_back(std::move(pts));
  }
  return {{"method", ens.method}, {"seed", ens.seed}, {"params", params}, {"replicates", reps}};
}

Ensemble ensemble_from_json(const json& j) {
  try {
    Ensemble ens;
    ens.method = j.at("method").get<std::string>();
    ens.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("params").items()) {
      if (k == "dim") {
        ens.dim = v.get<int>();
      } else if (k == "domain") {
        const auto d = v.get<std::vector<double>>();
        if (d.size() != 4) throw Error(ErrorKind::Io, "domain needs 4 bounds");
        ens.domain = Domain{d[0], d[1], d[2], d[3]};
      } else if (v.is_number()) {
        ens.params[k] = v.get<double>();
      }
    }
    for (const auto& rep : j.at("replicates")) {
      Ppd ppd{ens.dim, {}};
      for (const auto& p : rep) ppd.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      ens.replicates.push_back(std::move(ppd));
    }
    return ens;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed ensemble JSON: ") + e.what());
  }
}

json verdict_to_json(const SignificanceVerdict& verdict) {
  json j = {{"method", verdict.method},
            {"threshold", verdict.threshold},
            {"significant_indices", verdict.significant}};
  if (verdict.degenerate) j["degenerate"] = true;
  return j;
}

void write_rank_csv(std::ostream& out, const RankDistribution& dist) {
  out << "dim,rank,probability\n";
  for (const auto& [k, p] : dist.probabilities)
    out << dist.dim << ',' << k << ',' << format_double(p) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "param,dim,rank,probability\n";
  for (const auto& row : table.rows)
    out << format_double(row.param) << ',' << row.dim << ',' << row.rank << ','
        << format_double(row.probability) << '\n';
  for (const auto& f : table.failures)
    out << "# error param=" << format_double(f.param) << " stage=" << f.stage << ": "
        << f.message << '\n';
}

json config_to_json(const SweepConfig& cfg) {
  json bandwidth = nullptr;
  if (cfg.grid.bandwidth) bandwidth = {cfg.grid.bandwidth->x, cfg.grid.bandwidth->v};
  return {
      {"system",
       {{"name", to_string(cfg.system.kind)},
        {"h", cfg.system.h},
        {"a", cfg.system.a},
        {"q1", cfg.system.q1},
        {"d11", cfg.system.d11},
        {"d22", cfg.system.d22}}},
      {"param", cfg.param},
      {"values", cfg.values},
      {"simulation",
       {{"dt", cfg.sim.dt},
        {"n_steps", cfg.sim.n_steps},
        {"burn_in", cfg.sim.burn_in},
        {"stride", cfg.sim.stride},
        {"x0", cfg.sim.initial.x},
        {"v0", cfg.sim.initial.v}}},
      {"grid", {{"nx", cfg.grid.nx}, {"nv", cfg.grid.nv}, {"bandwidth", bandwidth}}},
      {"replication",
       {{"method", to_string(cfg.replication.method)},
        {"replicates", cfg.replication.replicates},
        {"gibbs", mcmc_gibbs_json(cfg.replication.gibbs)},
        {"pipp", mcmc_pipp_json(cfg.replication.pipp)}}},
      {"detector",
       {{"kind", to_string(cfg.detector.kind)},
        {"alpha", cfg.detector.alpha},
        {"resamples", cfg.detector.resamples}}},
      {"dim", cfg.dim},
      {"seed", cfg.seed}};
}

SweepConfig config_from_json(const json& j) {
  try {
    SweepConfig cfg;
    const auto& sys = j.at("system");
    cfg.system.kind = parse_system(sys.at("name").get<std::string>());
    cfg.system.h = sys.at("h").get<double>();
    cfg.system.a = sys.at("a").get<double>();
    cfg.system.q1 = sys.at("q1").get<double>();
    cfg.system.d11 = sys.at("d11").get<double>();
    cfg.system.d22 = sys.at("d22").get<double>();
    cfg.param = j.at("param").get<std::string>();
    cfg.values = j.at("values").get<std::vector<double>>();
    const auto& sim = j.at("simulation");
    cfg.sim.dt = sim.at("dt").get<double>();
    cfg.sim.n_steps = sim.at("n_steps").get<std::uint64_t>();
    cfg.sim.burn_in = sim.at("burn_in").get<std::uint64_t>();
    cfg.sim.stride = sim.at("stride").get<std::uint64_t>();
    cfg.sim.initial = {sim.at("x0").get<double>(), sim.at("v0").get<double>()};
    const auto& grid = j.at("grid");
    cfg.grid.nx = grid.at("nx").get<std::size_t>();
    cfg.grid.nv = grid.at("nv").get<std::size_t>();
    if (!grid.at("bandwidth").is_null()) {
      const auto bw = grid.at("bandwidth").get<std::vector<double>>();
      if (bw.size() != 2) throw Error(ErrorKind::Io, "bandwidth needs two values");
      cfg.grid.bandwidth = Bandwidth{bw[0], bw[1]};
    }
    const auto& rep = j.at("replication");
    cfg.replication.method = parse_replication_method(rep.at("method").get<std::string>());
    cfg.replication.replicates = rep.at("replicates").get<std::size_t>();
    const auto& g = rep.at("gibbs");
    cfg.replication.gibbs = {g.at("burn_in_sweeps").get<std::size_t>(),
                             g.at("thin_sweeps").get<std::size_t>(),
                             g.at("proposal_sigma").get<double>()};
    const auto& p = rep.at("pipp");
    cfg.replication.pipp = {p.at("burn_in_sweeps").get<std::size_t>(),
                            p.at("thin_sweeps").get<std::size_t>(),
                            p.at("p_birth").get<double>(),
                            p.at("p_death").get<double>(),
                            p.at("p_move").get<double>(),
                            p.at("proposal_sigma").get<double>()};
    const auto& det = j.at("detector");
    cfg.detector = {parse_detector(det.at("kind").get<std::string>()),
                    det.at("alpha").get<double>(), det.at("resamples").get<std::size_t>()};
    cfg.dim = j.at("dim").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed sweep config: ") + e.what());
  }
}

json manifest_to_json(const SweepTable& table) {
  json seeds = json::array();
  for (std::size_t i = 0; i < table.seeds.size(); ++i)
    seeds.push_back({{"param", table.config.values[i]},
                     {"simulation", table.seeds[i].simulation},
                     {"replication", table.seeds[i].replication}});
  json failures = json::array();
  for (const auto& f : table.failures)
    failures.push_back({{"param", f.param}, {"stage", f.stage}, {"message", f.message}});
  return {{"tool", "bifwatch"},
          {"version", version()},
          {"config", config_to_json(table.config)},
          {"unit_seeds", seeds},
          {"failures", failures}};
}

SweepConfig config_from_manifest(const json& manifest) {
  if (!manifest.contains("config")) throw Error(ErrorKind::Io, "manifest has no config");
  return config_from_json(manifest.at("config"));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace bifwatch::io
