#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "bifwatch/pipeline.hpp"

namespace bifwatch::io {

using nlohmann::json;

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// header `t,x,v`
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::vector<State> read_trajectory_csv(std::istream& in);

// {spec:{x_min,x_max,v_min,v_max,nx,nv}, values:[row-major]}
json grid_to_json(const DensityGrid& grid);
DensityGrid grid_from_json(const json& j);

// header `dim,birth,death`
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd);
PersistenceDiagram read_diagram_csv(std::istream& in);

// {method, seed, params, replicates:[[[b,l],...],...]}
json ensemble_to_json(const Ensemble& ens);
Ensemble ensemble_from_json(const json& j);

// {method, threshold, significant_indices}
json verdict_to_json(const SignificanceVerdict& verdict);

// header `dim,rank,probability`
void write_rank_csv(std::ostream& out, const RankDistribution& dist);

// header `param,dim,rank,probability`; failed parameter points are
// reported as `#` comment lines after the rows.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

json config_to_json(const SweepConfig& cfg);
SweepConfig config_from_json(const json& j);

// Config echo, tool version, per-point seeds and failures.
json manifest_to_json(const SweepTable& table);
SweepConfig config_from_manifest(const json& manifest);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

const char* version() noexcept;

}  // namespace bifwatch::io
