// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "bifwatch/density.hpp"
#include "bifwatch/significance.hpp"

using namespace bifwatch;

namespace {

std::vector<State> cloud(std::size_t n) {
  Rng rng = make_rng(1);
  std::normal_distribution<double> z;
  std::vector<State> s(n);
  for (auto& p : s) p = {z(rng) + (z(rng) > 0 ? 1.5 : -1.5), z(rng)};
  return s;
}

Ensemble ensemble(std::size_t reps, std::size_t n) {
  Rng rng = make_rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Ppd p;
  for (std::size_t i = 0; i < n; ++i) p.points.push_back({u(rng), 0.2 * u(rng) * u(rng)});
  p.points.push_back({1.0, 0.9});
  return sample_subsample(p, reps, 3);
}

void BM_KdeParallel(benchmark::State& st) {
  auto s = cloud(static_cast<std::size_t>(st.range(0)));
  auto bw = silverman_bandwidth(s);
  auto spec = default_grid(s, bw, 64, 64);
  for (auto _ : st) benchmark::DoNotOptimize(estimate_kde(s, spec, bw));
  st.counters["threads"] = omp_get_max_threads();
}

void BM_KdeSerial(benchmark::State& st) {
  auto s = cloud(static_cast<std::size_t>(st.range(0)));
  auto bw = silverman_bandwidth(s);
  auto spec = default_grid(s, bw, 64, 64);
  for (auto _ : st) benchmark::DoNotOptimize(estimate_kde_serial(s, spec, bw));
}

void BM_RankParallel(benchmark::State& st) {
  auto e = ensemble(500, static_cast<std::size_t>(st.range(0)));
  Detector d{DetectorKind::Bootstrap, 0.05, 200};
  for (auto _ : st) benchmark::DoNotOptimize(rank_distribution(e, d));
  st.counters["threads"] = omp_get_max_threads();
}

void BM_RankSerial(benchmark::State& st) {
  auto e = ensemble(500, static_cast<std::size_t>(st.range(0)));
  Detector d{DetectorKind::Bootstrap, 0.05, 200};
  for (auto _ : st) benchmark::DoNotOptimize(rank_distribution_serial(e, d));
}

}  // namespace

BENCHMARK(BM_KdeParallel)->Arg(20000)->Arg(180000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KdeSerial)->Arg(20000)->Arg(180000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankParallel)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankSerial)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
