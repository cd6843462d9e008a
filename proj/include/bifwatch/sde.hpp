#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bifwatch {

struct State {
  double x = 0.0;
  double v = 0.0;

  bool finite() const noexcept;
  friend bool operator==(const State&, const State&) = default;
};

// Diffusion amplitudes applied to independent Wiener increments on (x, v).
struct NoiseAmplitude {
  double gx = 0.0;
  double gv = 0.0;
};

struct SystemDef {
  std::string name;
  std::function<State(const State&)> drift;
  std::function<NoiseAmplitude(const State&)> noise;
};

struct SimConfig {
  double dt = 1e-3;
  std::uint64_t n_steps = 2'000'000;
  std::uint64_t burn_in = 200'000;
  std::uint64_t stride = 10;
  State initial{0.1, 0.1};
  std::uint64_t seed = 0;

  // Throws Error(InvalidArgument) when dt <= 0, burn_in >= n_steps or stride == 0.
  void validate() const;
  std::size_t expected_samples() const noexcept;
};

struct Trajectory {
  std::vector<State> samples;
  SimConfig config;
  std::string system;

  // Simulation time of retained sample i.
  double time_of(std::size_t i) const noexcept;
};

// x'' + x' + h x + x^3 = q1 dW
SystemDef duffing_system(double h, double q1);

// x'' + (h + x^2 + x'^2) x' + x = q1 dW
SystemDef rvdp_system(double h, double q1);

// Quintic oscillator with additive (dW1) and multiplicative (x' dW2) noise.
// U is the potential of the restoring force h0(x) = x^3 + a x^2 - x with U(0) = 0.
SystemDef quintic_system(double h, double a, double d11, double d22);

double quintic_potential(double x, double a) noexcept;

// Euler-Maruyama. Deterministic for a fixed seed; throws DivergenceError.
Trajectory integrate(const SystemDef& sys, const SimConfig& cfg);

}  // namespace bifwatch
