#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bifwatch/sde.hpp"

namespace bifwatch {

struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double v_min = 0.0;
  double v_max = 1.0;
  std::size_t nx = 64;
  std::size_t nv = 64;

  void validate() const;
  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx); }
  double dv() const noexcept { return (v_max - v_min) / static_cast<double>(nv); }
  double x_center(std::size_t i) const noexcept {
    return x_min + (static_cast<double>(i) + 0.5) * dx();
  }
  double v_center(std::size_t j) const noexcept {
    return v_min + (static_cast<double>(j) + 0.5) * dv();
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Row-major nx-by-nv matrix: value(i, j) sits at i * nv + j, i along x.
struct DensityGrid {
  GridSpec spec;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[i * spec.nv + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * spec.nv + j]; }
  double max_value() const;
  double min_value() const;
};

struct Bandwidth {
  double x = 0.0;
  double v = 0.0;
};

// Gaussian kernels are cut off beyond this many bandwidths.
inline constexpr double kKernelCutoff = 4.0;

// 1.06 * sd * n^(-1/5) per axis. Throws DegenerateSamples on zero spread.
Bandwidth silverman_bandwidth(std::span<const State> samples);

// [min - 3h, max + 3h] on each axis with the given cell counts.
GridSpec default_grid(std::span<const State> samples, const Bandwidth& bw,
                      std::size_t nx = 64, std::size_t nv = 64);

// Product-Gaussian KDE at cell centers, rows evaluated in parallel.
// Each row owns its output cells and sums samples in a fixed order, so the
// result does not depend on the thread count.
DensityGrid estimate_kde(std::span<const State> samples, const GridSpec& spec,
                         std::optional<Bandwidth> bandwidth = std::nullopt);
DensityGrid estimate_kde(const Trajectory& traj, const GridSpec& spec,
                         std::optional<Bandwidth> bandwidth = std::nullopt);

// Direct cell-by-sample double loop with the same truncation. Reference for tests.
DensityGrid estimate_kde_serial(std::span<const State> samples,
                                const GridSpec& spec,
                                std::optional<Bandwidth> bandwidth = std::nullopt);

// Divides by the maximum so that the result peaks at exactly 1. Throws AllZero.
DensityGrid unit_normalize(const DensityGrid& grid);

}  // namespace bifwatch
