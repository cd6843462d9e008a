#include "bifwatch/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bifwatch/error.hpp"

namespace bifwatch {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double sample_sd(std::span<const State> samples, double State::*axis) {
  const auto n = static_cast<double>(samples.size());
  if (samples.size() < 2) return 0.0;
  double mean = 0.0;
  for (const auto& s : samples) mean += s.*axis;
  mean /= n;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double d = s.*axis - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (n - 1.0));
}

Bandwidth resolve_bandwidth(std::span<const State> samples,
                            const std::optional<Bandwidth>& bandwidth) {
  if (!bandwidth) return silverman_bandwidth(samples);
  if (!(bandwidth->x > 0.0) || !(bandwidth->v > 0.0))
    throw Error(ErrorKind::InvalidArgument, "bandwidth must be positive");
  return *bandwidth;
}

void check_inputs(std::span<const State> samples, const GridSpec& spec) {
  spec.validate();
  if (samples.empty())
    throw Error(ErrorKind::EmptyTrajectory, "cannot estimate a density from no samples");
}

inline double kernel(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

}  // namespace

void GridSpec::validate() const {
  if (!(x_min < x_max) || !(v_min < v_max))
    throw Error(ErrorKind::InvalidArgument, "grid bounds must be increasing");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(v_min) ||
      !std::isfinite(v_max))
    throw Error(ErrorKind::InvalidArgument, "grid bounds must be finite");
  if (nx < 2 || nv < 2)
    throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 cells per axis");
}

double DensityGrid::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DensityGrid::min_value() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

Bandwidth silverman_bandwidth(std::span<const State> samples) {
  if (samples.empty())
    throw Error(ErrorKind::EmptyTrajectory, "cannot estimate a density from no samples");
  const double factor = 1.06 * std::pow(static_cast<double>(samples.size()), -0.2);
  const double sx = sample_sd(samples, &State::x);
  const double sv = sample_sd(samples, &State::v);
  if (!(sx > 0.0) || !(sv > 0.0))
    throw Error(ErrorKind::DegenerateSamples,
                "zero sample variance on an axis; pass an explicit bandwidth");
  return {factor * sx, factor * sv};
}

GridSpec default_grid(std::span<const State> samples, const Bandwidth& bw,
                      std::size_t nx, std::size_t nv) {
  if (samples.empty())
    throw Error(ErrorKind::EmptyTrajectory, "cannot size a grid from no samples");
  auto [xlo, xhi] = std::minmax_element(
      samples.begin(), samples.end(),
      [](const State& a, const State& b) { return a.x < b.x; });
  auto [vlo, vhi] = std::minmax_element(
      samples.begin(), samples.end(),
      [](const State& a, const State& b) { return a.v < b.v; });
  GridSpec spec{xlo->x - 3.0 * bw.x, xhi->x + 3.0 * bw.x,
                vlo->v - 3.0 * bw.v, vhi->v + 3.0 * bw.v, nx, nv};
  spec.validate();
  return spec;
}

DensityGrid estimate_kde(std::span<const State> samples, const GridSpec& spec,
                         std::optional<Bandwidth> bandwidth) {
  check_inputs(samples, spec);
  const Bandwidth bw = resolve_bandwidth(samples, bandwidth);

  // Sort by x so each grid row only touches samples within the cutoff.
  std::vector<State> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const State& a, const State& b) { return a.x < b.x; });

  DensityGrid grid{spec, std::vector<double>(spec.nx * spec.nv, 0.0)};
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bw.x * bw.v);
  const double reach_x = kKernelCutoff * bw.x;
  const double reach_v = kKernelCutoff * bw.v;
  const double dv = spec.dv();
  const auto nx = static_cast<std::ptrdiff_t>(spec.nx);
  const auto nv = static_cast<std::ptrdiff_t>(spec.nv);

#pragma omp parallel
  {
    std::vector<double> row(spec.nv);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      const double cx = spec.x_center(static_cast<std::size_t>(i));
      auto first = std::lower_bound(
          sorted.begin(), sorted.end(), cx - reach_x,
          [](const State& s, double x) { return s.x < x; });
      for (auto it = first; it != sorted.end() && it->x <= cx + reach_x; ++it) {
        const double ux = (cx - it->x) / bw.x;
        if (std::abs(ux) > kKernelCutoff) continue;
        const double kx = kernel(ux);
        const auto j_lo = std::max<std::ptrdiff_t>(
            0, static_cast<std::ptrdiff_t>(std::floor((it->v - reach_v - spec.v_min) / dv - 0.5)));
        const auto j_hi = std::min<std::ptrdiff_t>(
            nv - 1, static_cast<std::ptrdiff_t>(std::ceil((it->v + reach_v - spec.v_min) / dv - 0.5)));
        for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
          const double uv = (spec.v_center(static_cast<std::size_t>(j)) - it->v) / bw.v;
          if (std::abs(uv) > kKernelCutoff) continue;
          row[static_cast<std::size_t>(j)] += kx * kernel(uv);
        }
      }
      for (std::ptrdiff_t j = 0; j < nv; ++j)
        grid.values[static_cast<std::size_t>(i * nv + j)] = row[static_cast<std::size_t>(j)] * norm;
    }
  }
  return grid;
}

DensityGrid estimate_kde(const Trajectory& traj, const GridSpec& spec,
                         std::optional<Bandwidth> bandwidth) {
  return estimate_kde(std::span<const State>(traj.samples), spec, bandwidth);
}

DensityGrid estimate_kde_serial(std::span<const State> samples,
                                const GridSpec& spec,
                                std::optional<Bandwidth> bandwidth) {
  check_inputs(samples, spec);
  const Bandwidth bw = resolve_bandwidth(samples, bandwidth);
  DensityGrid grid{spec, std::vector<double>(spec.nx * spec.nv, 0.0)};
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bw.x * bw.v);
  for (std::size_t i = 0; i < spec.nx; ++i) {
    for (std::size_t j = 0; j < spec.nv; ++j) {
      const double cx = spec.x_center(i);
      const double cv = spec.v_center(j);
      double sum = 0.0;
      for (const auto& s : samples) {
        const double ux = (cx - s.x) / bw.x;
        const double uv = (cv - s.v) / bw.v;
        if (std::abs(ux) > kKernelCutoff || std::abs(uv) > kKernelCutoff) continue;
        sum += kernel(ux) * kernel(uv);
      }
      grid.at(i, j) = sum * norm;
    }
  }
  return grid;
}

DensityGrid unit_normalize(const DensityGrid& grid) {
  const double peak = grid.max_value();
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw Error(ErrorKind::AllZero, "cannot normalize a grid without a positive maximum");
  DensityGrid out = grid;
  for (auto& value : out.values) value /= peak;
  // Division of the peak by itself is exact, so max is exactly 1.
  return out;
}

}  // namespace bifwatch
