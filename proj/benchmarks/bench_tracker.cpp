// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <benchmark/benchmark.h>

#include "opdad/rng.hpp"
#include "opdad/tracker.hpp"

namespace {

using namespace opdad;

void BM_OjaUpdate(benchmark::State& state) {
  const int dim = 2 * static_cast<int>(state.range(0));
  RngStream rng(1);
  TrackerState tracker = TrackerState::random_init(dim, 1.0, rng);
  std::vector<Eigen::VectorXd> samples(64);
  for (auto& s : samples) {
    s.resize(dim);
    for (int i = 0; i < dim; ++i) s(i) = rng.gaussian();
  }
  std::size_t cursor = 0;
  for (auto _ : state) {
    tracker.update(samples[cursor]);
    cursor = (cursor + 1) % samples.size();
    benchmark::DoNotOptimize(tracker.estimate().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OjaUpdate)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_DensityFeature(benchmark::State& state) {
  const int dim = 2 * static_cast<int>(state.range(0));
  RngStream rng(2);
  TrackerState tracker = TrackerState::random_init(dim, 1.0, rng);
  for (auto _ : state) {
    DensityFeature f = density_feature(tracker.estimate());
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_DensityFeature)->RangeMultiplier(4)->Range(16, 256);

void BM_PhaseFeature(benchmark::State& state) {
  const int dim = 2 * static_cast<int>(state.range(0));
  RngStream rng(3);
  TrackerState tracker = TrackerState::random_init(dim, 1.0, rng);
  for (auto _ : state) {
    DensityFeature f = phase_feature(tracker.estimate());
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_PhaseFeature)->RangeMultiplier(4)->Range(16, 256);

}  // namespace

BENCHMARK_MAIN();
