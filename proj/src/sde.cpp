#include "bifwatch/sde.hpp"

#include <cmath>

#include "bifwatch/error.hpp"
#include "bifwatch/rng.hpp"

namespace bifwatch {

bool State::finite() const noexcept {
  return std::isfinite(x) && std::isfinite(v);
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (burn_in >= n_steps)
    throw Error(ErrorKind::InvalidArgument, "burn_in must be less than n_steps");
  if (stride == 0)
    throw Error(ErrorKind::InvalidArgument, "stride must be at least 1");
  if (!initial.finite())
    throw Error(ErrorKind::InvalidArgument, "initial state must be finite");
}

std::size_t SimConfig::expected_samples() const noexcept {
  return static_cast<std::size_t>((n_steps - burn_in) / stride);
}

double Trajectory::time_of(std::size_t i) const noexcept {
  const auto step = config.burn_in + (i + 1) * config.stride;
  return static_cast<double>(step) * config.dt;
}

SystemDef duffing_system(double h, double q1) {
  if (!(q1 >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "q1 must be non-negative");
  return SystemDef{
      "duffing",
      [h](const State& s) {
        return State{s.v, -s.v - h * s.x - s.x * s.x * s.x};
      },
      [q1](const State&) { return NoiseAmplitude{0.0, q1}; }};
}

SystemDef rvdp_system(double h, double q1) {
  if (!(q1 >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "q1 must be non-negative");
  return SystemDef{
      "rvdp",
      [h](const State& s) {
        return State{s.v, -(h + s.x * s.x + s.v * s.v) * s.v - s.x};
      },
      [q1](const State&) { return NoiseAmplitude{0.0, q1}; }};
}

double quintic_potential(double x, double a) noexcept {
  const double x2 = x * x;
  return x2 * x2 / 4.0 + a * x2 * x / 3.0 - x2 / 2.0;
}

SystemDef quintic_system(double h, double a, double d11, double d22) {
  if (!(d11 >= 0.0) || !(d22 >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "d11 and d22 must be non-negative");
  return SystemDef{
      "quintic",
      [h, a, d11, d22](const State& s) {
        const double e = 2.0 * quintic_potential(s.x, a) + h;
        const double h0 = s.x * s.x * s.x + a * s.x * s.x - s.x;
        const double v = s.v;
        const double v3 = v * v * v;
        const double v5 = v3 * v * v;
        const double accel = -2.0 * (d11 * e - 0.5 * d22) * v -
                             2.0 * (d22 * e + d11) * v3 - 2.0 * d22 * v5 - h0;
        return State{v, accel};
      },
      // dW1 + v dW2 with independent increments is equal in law to
      // sqrt(1 + v^2) times a single increment.
      [](const State& s) { return NoiseAmplitude{0.0, std::sqrt(1.0 + s.v * s.v)}; }};
}

Trajectory integrate(const SystemDef& sys, const SimConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.config = cfg;
  traj.system = sys.name;
  traj.samples.reserve(cfg.expected_samples());

  Rng rng = make_rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_dt = std::sqrt(cfg.dt);

  State s = cfg.initial;
  for (std::uint64_t step = 0; step < cfg.n_steps; ++step) {
    const State f = sys.drift(s);
    const NoiseAmplitude g = sys.noise(s);
    const double dw_x = normal(rng);
    const double dw_v = normal(rng);
    s.x += f.x * cfg.dt + g.gx * sqrt_dt * dw_x;
    s.v += f.v * cfg.dt + g.gv * sqrt_dt * dw_v;
    if (!s.finite()) throw DivergenceError(step + 1);
    if (step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.stride == 0)
      traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace bifwatch
