// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <benchmark/benchmark.h>

#include "opdad/harness.hpp"
#include "opdad/oracle.hpp"

namespace {

using namespace opdad;

ScenarioConfig bench_scenario(int antennas) {
  ScenarioConfig cfg;
  cfg.users = 4;
  cfg.jammers = 2;
  cfg.antennas = antennas;
  cfg.blocks = 64;
  cfg.window_start = 10;
  cfg.window_end = 50;
  cfg.burst_count = 10;
  cfg.training_blocks = 50;
  return cfg;
}

void BM_OnlineDetectorStep(benchmark::State& state) {
  const ScenarioConfig cfg = bench_scenario(static_cast<int>(state.range(0)));
  RngStream rng(11);
  const Scenario scenario(cfg, rng);
  const auto training = scenario.training_phase(cfg.training_blocks, rng);
  const auto online = scenario.online_phase(rng);
  OnlineDetector detector = make_online_detector(training, DetectorConfig{}, rng);
  std::size_t cursor = 0;
  for (auto _ : state) {
    DetectionEvent e = detector.step(online[cursor]);
    cursor = (cursor + 1) % online.size();
    benchmark::DoNotOptimize(e.deviation);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OnlineDetectorStep)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_SubspaceDetectorStep(benchmark::State& state) {
  const ScenarioConfig cfg = bench_scenario(static_cast<int>(state.range(0)));
  RngStream rng(13);
  const Scenario scenario(cfg, rng);
  const auto training = scenario.training_phase(cfg.training_blocks, rng);
  const auto online = scenario.online_phase(rng);
  SubspaceDetector detector = SubspaceDetector::calibrate(training);
  std::size_t cursor = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detector.step(online[cursor]));
    cursor = (cursor + 1) % online.size();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SubspaceDetectorStep)->RangeMultiplier(2)->Range(16, 128)->Complexity();

}  // namespace
