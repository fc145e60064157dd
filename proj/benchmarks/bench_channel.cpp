// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <benchmark/benchmark.h>

#include "opdad/channel.hpp"

namespace {

using namespace opdad;

void BM_OneRingCovariance(benchmark::State& state) {
  ChannelGeometry geom{0.3, deg_to_rad(5.0), 100.0, EmitterKind::legitimate};
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    CovarianceMatrix cov = one_ring_covariance(geom, m);
    benchmark::DoNotOptimize(cov.entries().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OneRingCovariance)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_ChannelDraw(benchmark::State& state) {
  ChannelGeometry geom{0.3, deg_to_rad(5.0), 100.0, EmitterKind::legitimate};
  const int m = static_cast<int>(state.range(0));
  ChannelSampler sampler(one_ring_covariance(geom, m));
  RngStream rng(5);
  Eigen::VectorXcd h;
  for (auto _ : state) {
    sampler.sample_into(h, rng);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_ChannelDraw)->RangeMultiplier(2)->Range(16, 256);

}  // namespace
