// Microbenchmarks for the hot paths: extremal solves, bandwidth scans,
// Monte-Carlo calibration, and the scalar special functions they lean on.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "seqdetect/analysis.hpp"
#include "seqdetect/extremal.hpp"
#include "seqdetect/math.hpp"

namespace {

seqdetect::ProblemSpec mild_spec(std::size_t n) {
  return seqdetect::make_preset_spec(seqdetect::FamilyPreset::kMild, 1.0, 1.0,
                                     0.01, n);
}

void BM_SolveExtremal(benchmark::State& state) {
  const seqdetect::ProblemSpec spec =
      mild_spec(static_cast<std::size_t>(state.range(0)));
  const double r = 0.5 / spec.a(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(seqdetect::solve_extremal(spec, r));
  }
}
BENCHMARK(BM_SolveExtremal)->Arg(256)->Arg(4096)->Arg(65536);

void BM_LowerRadius(benchmark::State& state) {
  const seqdetect::ProblemSpec spec =
      mild_spec(static_cast<std::size_t>(state.range(0)));
  const seqdetect::ErrorBudget budget;
  for (auto _ : state) {
    benchmark::DoNotOptimize(seqdetect::lower_radius(spec, budget));
  }
}
BENCHMARK(BM_LowerRadius)->Arg(1024)->Arg(16384);

void BM_CalibrateSpectral(benchmark::State& state) {
  const seqdetect::ProblemSpec spec = mild_spec(64);
  seqdetect::CalibrationRequest request;
  request.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        seqdetect::calibrate_spectral(spec, 16, 0.05, request));
  }
}
BENCHMARK(BM_CalibrateSpectral)->Arg(10000)->Arg(100000);

void BM_IngsterStatistic(benchmark::State& state) {
  const seqdetect::ProblemSpec spec = mild_spec(256);
  const seqdetect::IngsterTest test =
      seqdetect::build_ingster(spec, 0.3, 0.05);
  std::vector<double> y(spec.truncation);
  seqdetect::RngStream rng(7, 0);
  for (double& v : y) {
    v = spec.noise * rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(seqdetect::ingster_statistic(test, y));
  }
}
BENCHMARK(BM_IngsterStatistic);

void BM_NormalQuantile(benchmark::State& state) {
  double p = 0.0001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(seqdetect::normal_quantile(p));
    p += 0.0001;
    if (p >= 1.0) {
      p = 0.0001;
    }
  }
}
BENCHMARK(BM_NormalQuantile);

}  // namespace

BENCHMARK_MAIN();
