#include <cmath>
#include <vector>

#include "doctest.h"

#include "bifwatch/error.hpp"
#include "bifwatch/sde.hpp"
#include "oracles.hpp"

using namespace bifwatch;

namespace {

SystemDef linear_system(double h, double q1) {
  return {"linear", [h](const State& s) { return State{s.v, -s.v - h * s.x}; },
          [q1](const State&) { return NoiseAmplitude{0.0, q1}; }};
}

SystemDef frozen_system() {
  return {"frozen", [](const State&) { return State{0.0, 0.0}; },
          [](const State&) { return NoiseAmplitude{0.0, 0.0}; }};
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("duffing drift") {
  auto s = duffing_system(0.7, 0.3);
  CHECK(s.drift({0, 0}) == State{0, 0});
  auto b = duffing_system(-1.0, 0.0);
  CHECK(b.drift({1, 0}) == State{0, 0});
  CHECK(b.drift({0, 1}) == State{1, -1});
  CHECK_THROWS_AS(duffing_system(1.0, -0.1), Error);
}

TEST_CASE("rvdp drift") {
  CHECK(rvdp_system(2.0, 0.3).drift({0, 0}) == State{0, 0});
  CHECK(rvdp_system(-1.0, 0.3).drift({1, 0}) == State{0, -1});
  CHECK(rvdp_system(0.0, 0.3).drift({1, 1}) == State{1, -3});
}

TEST_CASE("quintic drift and potential") {
  CHECK(quintic_system(0.4, 0.2, 0.1, 0.1).drift({0, 0}) == State{0, 0});
  CHECK(quintic_system(-3.0, 0.0, 0.5, 0.7).drift({1, 0}) == State{0, 0});
  CHECK(quintic_system(1.0, 0.0, 0.0, 0.0).drift({0, 1}) == State{1, 0});
  CHECK(quintic_potential(0.0, 0.3) == 0.0);
  // U' = h0 by central difference
  for (double x : {-1.3, -0.2, 0.5, 1.7}) {
    double a = 0.4, e = 1e-5;
    double d = (quintic_potential(x + e, a) - quintic_potential(x - e, a)) / (2 * e);
    CHECK(d == doctest::Approx(x * x * x + a * x * x - x).epsilon(1e-7));
  }
  auto q = quintic_system(0.0, 0.0, 0.1, 0.1);
  CHECK(q.noise({0, 2}).gv == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(quintic_system(0, 0, -1, 0), Error);
}

TEST_CASE("config validation") {
  SimConfig c;
  c.n_steps = 100;
  c.burn_in = 10;
  CHECK_NOTHROW(c.validate());
  CHECK(c.expected_samples() == 9);
  auto bad = c;
  bad.dt = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.burn_in = 100;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.stride = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sample count and times") {
  SimConfig c;
  c.n_steps = 1000;
  c.burn_in = 100;
  c.stride = 7;
  auto t = integrate(duffing_system(1, 0.3), c);
  CHECK(t.samples.size() == c.expected_samples());
  CHECK(t.time_of(0) == doctest::Approx(107 * c.dt));
}

TEST_CASE("constant trajectory without drift or noise") {
  SimConfig c;
  c.n_steps = 5000;
  c.burn_in = 0;
  c.stride = 1;
  c.initial = {0.3, 0.7};
  auto t = integrate(frozen_system(), c);
  for (const auto& s : t.samples) CHECK(s == State{0.3, 0.7});
}

TEST_CASE("deterministic equilibrium") {
  SimConfig c;
  c.n_steps = 20000;
  c.burn_in = 0;
  c.initial = {1, 0};
  for (const auto& s : integrate(duffing_system(-1, 0), c).samples) {
    CHECK(std::abs(s.x - 1) < 1e-9);
    CHECK(std::abs(s.v) < 1e-9);
  }
}

TEST_CASE("determinism and noise scaling") {
  SimConfig c;
  c.n_steps = 20000;
  c.burn_in = 1000;
  c.seed = 42;
  auto a = integrate(rvdp_system(-0.5, 0.3), c);
  auto b = integrate(rvdp_system(-0.5, 0.3), c);
  CHECK(a.samples == b.samples);
  c.seed = 43;
  CHECK(integrate(rvdp_system(-0.5, 0.3), c).samples != a.samples);
  auto q0 = integrate(rvdp_system(-0.5, 0.0), c);
  c.seed = 9999;
  CHECK(integrate(rvdp_system(-0.5, 0.0), c).samples == q0.samples);
}

TEST_CASE("divergence reports the step") {
  SystemDef blow{"blow", [](const State& s) { return State{s.x * s.x, 0.0}; },
                 [](const State&) { return NoiseAmplitude{}; }};
  SimConfig c;
  c.dt = 0.1;
  c.n_steps = 1000;
  c.burn_in = 0;
  c.initial = {10, 0};
  try {
    integrate(blow, c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(e.step() > 0);
    CHECK(e.step() < 20);
  }
}

TEST_CASE("linear SDE stationary variance") {
  // Var(x) = q1^2 / (2 h), Var(v) = q1^2 / 2 for x'' + x' + h x = q1 dW.
  const double q1 = 0.5;
  for (double h : {0.5, 1.0, 2.0}) {
    SimConfig c;
    c.dt = 0.01;
    c.n_steps = 1'000'000;
    c.burn_in = 10'000;
    c.stride = 5;
    c.initial = {0, 0};
    c.seed = 7;
    auto t = integrate(linear_system(h, q1), c);
    std::vector<double> xs, vs;
    for (auto& s : t.samples) {
      xs.push_back(s.x);
      vs.push_back(s.v);
    }
    CAPTURE(h);
    CHECK(oracle::variance(xs) == doctest::Approx(q1 * q1 / (2 * h)).epsilon(0.10));
    CHECK(oracle::variance(vs) == doctest::Approx(q1 * q1 / 2).epsilon(0.10));
  }
}

}  // TEST_SUITE
