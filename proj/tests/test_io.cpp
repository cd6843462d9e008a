#include <filesystem>
#include <limits>
#include <sstream>

#include "doctest.h"

#include "bifwatch/error.hpp"
#include "bifwatch/io.hpp"

using namespace bifwatch;

TEST_SUITE("io") {

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -1e-300, 123456789.125, 0.0}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-1.0) == "-1");
}

TEST_CASE("trajectory csv") {
  Trajectory t;
  t.config.burn_in = 2;
  t.config.stride = 3;
  t.config.dt = 0.1;
  t.samples = {{0.25, -1.0 / 3.0}, {1e-12, 7}};
  std::stringstream s;
  io::write_trajectory_csv(s, t);
  CHECK(s.str().rfind("t,x,v\n", 0) == 0);
  CHECK(io::read_trajectory_csv(s) == t.samples);
  std::istringstream bad("a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_trajectory_csv(bad), Error);
}

TEST_CASE("grid json") {
  DensityGrid g{{-1, 2, 0.5, 3, 2, 3}, {0.1, 0.2, 1.0 / 7.0, 0.4, 0.5, 1}};
  auto back = io::grid_from_json(io::json::parse(io::grid_to_json(g).dump()));
  CHECK(back.spec == g.spec);
  CHECK(back.values == g.values);
  auto j = io::grid_to_json(g);
  j["values"].erase(0);
  CHECK_THROWS_AS(io::grid_from_json(j), Error);
}

TEST_CASE("diagram csv") {
  PersistenceDiagram pd;
  pd.pairs = {{0, 1.0, 0.01, true}, {0, 0.7, 0.3, false}, {1, 0.6, 0.2, false}};
  std::stringstream s;
  io::write_diagram_csv(s, pd);
  CHECK(s.str().rfind("dim,birth,death\n", 0) == 0);
  auto back = io::read_diagram_csv(s);
  REQUIRE(back.pairs.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.pairs[k].dim == pd.pairs[k].dim);
    CHECK(back.pairs[k].birth == pd.pairs[k].birth);
    CHECK(back.pairs[k].death == pd.pairs[k].death);
  }
}

TEST_CASE("ensemble json") {
  Ensemble e;
  e.method = "gibbs";
  e.seed = 18446744073709551615ULL;
  e.dim = 1;
  e.domain = {0, 1, 0, 0.75};
  e.params = {{"theta", -0.25}};
  e.replicates = {Ppd{1, {{0.5, 0.1}, {0.25, 0.3}}}, Ppd{1, {}}};
  auto j = io::ensemble_to_json(e);
  CHECK(j.at("method") == "gibbs");
  CHECK(j.at("replicates").size() == 2);
  auto back = io::ensemble_from_json(io::json::parse(j.dump()));
  CHECK(back.seed == e.seed);
  CHECK(back.dim == 1);
  CHECK(back.domain == e.domain);
  CHECK(back.params == e.params);
  REQUIRE(back.replicates.size() == 2);
  CHECK(back.replicates[0].points == e.replicates[0].points);
  CHECK(back.replicates[1].empty());
}

TEST_CASE("verdict and rank csv") {
  SignificanceVerdict v{"mahalanobis", 2.5, {3, 7}, false};
  auto j = io::verdict_to_json(v);
  CHECK(j.at("method") == "mahalanobis");
  CHECK(j.at("threshold") == 2.5);
  CHECK(j.at("significant_indices") == io::json::array({3, 7}));
  std::ostringstream s;
  io::write_rank_csv(s, RankDistribution{0, {{0, 0.5}, {1, 0.25}, {2, 0.25}}});
  CHECK(s.str() == "dim,rank,probability\n0,0,0.5\n0,1,0.25\n0,2,0.25\n");
}

TEST_CASE("config json round trip") {
  SweepConfig c;
  c.system = {SystemKind::Quintic, 0.1, -0.5, 0.3, 0.2, 0.05};
  c.param = "a";
  c.values = {-1, -0.5, 0};
  c.sim.n_steps = 1234;
  c.sim.burn_in = 10;
  c.grid = {40, 50, Bandwidth{0.1, 0.2}};
  c.replication.method = ReplicationMethod::Gibbs;
  c.replication.replicates = 17;
  c.replication.gibbs.proposal_sigma = 0.01;
  c.detector = {DetectorKind::Bootstrap, 0.1, 55};
  c.dim = 1;
  c.seed = 99;
  auto back = io::config_from_json(io::json::parse(io::config_to_json(c).dump()));
  CHECK(io::config_to_json(back) == io::config_to_json(c));
  CHECK(back.grid.bandwidth->v == 0.2);
  CHECK_THROWS_AS(io::config_from_json(io::json::object()), Error);
}

TEST_CASE("file helpers") {
  auto dir = std::filesystem::temp_directory_path() / "bifwatch_io_test";
  std::filesystem::create_directories(dir);
  io::write_text(dir / "a.txt", "hello\n");
  CHECK(io::read_text(dir / "a.txt") == "hello\n");
  io::write_json(dir / "b.json", io::json{{"k", 1}});
  CHECK(io::read_json(dir / "b.json").at("k") == 1);
  CHECK_THROWS_AS(io::read_text(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
  CHECK(std::string(io::version()).size() > 0);
}

}  // TEST_SUITE
