// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "opdad/harness.hpp"
#include "opdad/rng.hpp"

using namespace opdad;

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.scenario.users = 2;
  cfg.scenario.jammers = 1;
  cfg.scenario.antennas = 8;
  cfg.scenario.blocks = 30;
  cfg.scenario.window_start = 5;
  cfg.scenario.window_end = 25;
  cfg.scenario.burst_count = 8;
  cfg.scenario.jammer_power_dbm = 18.0;
  cfg.scenario.training_blocks = 40;
  cfg.trials = 6;
  cfg.seed = 7;
  cfg.methods = {"opdad", "ed"};
  return cfg;
}

// Strips the timing column so determinism can be asserted on everything else.
std::string sweep_csv_without_timing(const std::vector<SweepRow>& rows) {
  std::stringstream out;
  write_sweep_csv(out, rows);
  std::stringstream filtered;
  std::string line;
  while (std::getline(out, line)) {
    std::size_t start = 0;
    int field = 0;
    std::string kept;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      if (field != 7) {  // wall_time_per_block column
        kept += line.substr(start, end - start);
        kept += '|';
      }
      start = end + 1;
      ++field;
    }
    filtered << kept << '\n';
  }
  return filtered.str();
}

}  // namespace

TEST_CASE("seed derivation is deterministic and spreads") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("config defaults mirror the standard simulation parameters") {
  const ExperimentConfig cfg = parse_config("{}");
  CHECK(cfg.scenario.users == 10);
  CHECK(cfg.scenario.antennas == 64);
  CHECK(cfg.scenario.blocks == 100);
  CHECK(cfg.scenario.user_power_dbm == 10.0);
  CHECK(cfg.scenario.noise_power_dbm == -90.0);
  CHECK(cfg.scenario.window_start == 10);
  CHECK(cfg.scenario.window_end == 50);
  CHECK(cfg.scenario.path_loss_exponent == 3.7);
  CHECK(cfg.detector.epsilon == 0.13);
  CHECK(cfg.detector.target_pfa == 0.05);
}

TEST_CASE("config parsing round trips the fields") {
  const char* text = R"({
    "scenario": {"K": 4, "N": 2, "M": 16, "L": 60, "P_U": 12.0, "P_J": 15.0,
                  "noise_power": -80.0, "window_start": 8, "window_end": 40,
                  "n_r": 10, "schedule_mode": "burst_exact_count",
                  "user_spread_deg": 3.0, "training_blocks": 30},
    "detector": {"epsilon": 0.2, "target_pfa": 0.1},
    "trials": 12,
    "seed": 99,
    "sweep": {"parameter": "P_J", "values": [5, 10, 15]},
    "methods": ["opdad", "ed", "sd"]
  })";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.scenario.users == 4);
  CHECK(cfg.scenario.jammers == 2);
  CHECK(cfg.scenario.antennas == 16);
  CHECK(cfg.scenario.blocks == 60);
  CHECK(cfg.scenario.user_power_dbm == 12.0);
  CHECK(cfg.scenario.schedule_mode == ScheduleMode::burst_exact_count);
  CHECK(cfg.scenario.user_spread == doctest::Approx(deg_to_rad(3.0)));
  CHECK(cfg.detector.epsilon == 0.2);
  CHECK(cfg.trials == 12);
  CHECK(cfg.seed == 99);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->parameter == "P_J");
  CHECK(cfg.sweep->values.size() == 3);
  CHECK(cfg.methods.size() == 3);
}

TEST_CASE("config validation failures carry diagnostics") {
  CHECK_THROWS_AS((void)parse_config("not json"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"methods": ["bogus"]})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"scenario": {"M": 0}})"), ValidationError);
  CHECK_THROWS_AS(
      (void)parse_config(R"({"sweep": {"parameter": "bogus", "values": [1]}})"),
      ValidationError);
  CHECK_THROWS_AS(
      (void)parse_config(R"({"sweep": {"parameter": "n_r", "values": [1000]}})"),
      ValidationError);
}

TEST_CASE("sweep values apply to the right knobs") {
  const ExperimentConfig base = small_experiment();
  CHECK(with_sweep_value(base, "n_r", 12).scenario.burst_count == 12);
  CHECK(with_sweep_value(base, "P_J", 3.5).scenario.jammer_power_dbm == 3.5);
  CHECK(with_sweep_value(base, "N", 4).scenario.jammers == 4);
  CHECK(with_sweep_value(base, "M", 16).scenario.antennas == 16);
  CHECK(with_sweep_value(base, "epsilon", 0.2).detector.epsilon == 0.2);
  CHECK_THROWS_AS((void)with_sweep_value(base, "bogus", 1.0), ValidationError);
}

TEST_CASE("run_trial is deterministic in the trial seed") {
  const ExperimentConfig cfg = small_experiment();
  const TrialResult a = run_trial(cfg, 1234, true);
  const TrialResult b = run_trial(cfg, 1234, true);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].decision == b.events[i].decision);
    // Bitwise equality; the ratio is NaN before the jamming centroid exists.
    CHECK(std::bit_cast<std::uint64_t>(a.events[i].ratio) ==
          std::bit_cast<std::uint64_t>(b.events[i].ratio));
    CHECK(a.events[i].deviation == b.events[i].deviation);
  }
  REQUIRE(a.methods.size() == b.methods.size());
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    CHECK(a.methods[i].detected == b.methods[i].detected);
    CHECK(a.methods[i].delay == b.methods[i].delay);
    CHECK(a.methods[i].pfa == b.methods[i].pfa);
  }
}

TEST_CASE("run_trial scoring conventions") {
  ExperimentConfig cfg = small_experiment();
  cfg.methods = {"opdad"};
  for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
    const TrialResult result = run_trial(cfg, seed, true);
    const MethodMetrics& m = result.methods.front();
    CHECK(result.first_attacked >= cfg.scenario.window_start);
    CHECK(m.attacked);
    if (m.detected) {
      CHECK(m.delay >= 0);
      CHECK(m.delay <= cfg.scenario.window_end - result.first_attacked);
    } else {
      CHECK(m.delay == -1);
    }
    CHECK(m.pfa >= 0.0);
    CHECK(m.pfa <= 1.0);
    CHECK(m.final_gap >= 0.0);

    // Flags before the first attacked block are false alarms, not detections.
    int first_flag = 0;
    for (const DetectionEvent& e : result.events) {
      if (e.decision == Decision::jamming) {
        first_flag = e.block_index;
        break;
      }
    }
    if (m.detected && first_flag > 0) CHECK(first_flag <= result.first_attacked + m.delay);
  }
}

TEST_CASE("no-attack trials cannot be misses") {
  ExperimentConfig cfg = small_experiment();
  cfg.scenario.burst_count = 0;
  cfg.methods = {"opdad"};
  const TrialResult result = run_trial(cfg, 5, false);
  CHECK(result.first_attacked == 0);
  CHECK_FALSE(result.methods.front().attacked);
  CHECK_FALSE(result.methods.front().detected);
}

TEST_CASE("sweep emits one row per point and method with sane aggregates") {
  ExperimentConfig cfg = small_experiment();
  cfg.sweep = SweepSpec{"P_J", {10.0, 18.0}};
  const std::vector<SweepRow> rows = sweep(cfg, 1);
  REQUIRE(rows.size() == 4);  // 2 points x 2 methods
  for (const SweepRow& row : rows) {
    CHECK((row.method == "opdad" || row.method == "ed"));
    CHECK(row.trials == cfg.trials);
    if (!std::isnan(row.p_miss)) {
      CHECK(row.p_miss >= 0.0);
      CHECK(row.p_miss <= 1.0);
    }
    CHECK(row.p_fa >= 0.0);
    CHECK(row.p_fa <= 1.0);
    if (!std::isnan(row.avg_delay)) {
      CHECK(row.avg_delay >= 0.0);
      CHECK(row.avg_delay <= cfg.scenario.window_end - cfg.scenario.window_start);
    }
  }
}

TEST_CASE("sweep output is bit-deterministic apart from the timing column") {
  ExperimentConfig cfg = small_experiment();
  cfg.sweep = SweepSpec{"n_r", {4.0, 8.0}};
  const std::string a = sweep_csv_without_timing(sweep(cfg, 1));
  const std::string b = sweep_csv_without_timing(sweep(cfg, 1));
  CHECK(a == b);
}

TEST_CASE("events csv format") {
  std::vector<DetectionEvent> events(2);
  events[0].block_index = 1;
  events[0].decision = Decision::normal;
  events[0].ratio = std::numeric_limits<double>::quiet_NaN();
  events[0].deviation = 0.25;
  events[0].truth_attacked = false;
  events[1].block_index = 2;
  events[1].decision = Decision::jamming;
  events[1].ratio = 1.5;
  events[1].deviation = 0.75;
  events[1].truth_attacked = true;

  std::stringstream out;
  write_events_csv(out, events);
  std::string line;
  std::getline(out, line);
  CHECK(line == "block,decision,ratio,deviation,truth");
  std::getline(out, line);
  CHECK(line.substr(0, 9) == "1,normal,");
  std::getline(out, line);
  CHECK(line.substr(0, 10) == "2,jamming,");
  CHECK(line.back() == '1');

  std::stringstream replay;
  write_events_csv(replay, events, {-1, -1});
  std::getline(replay, line);
  std::getline(replay, line);
  CHECK(line.back() == '1');  // "-1" ends in '1'
  CHECK(line.find(",-1") != std::string::npos);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman_rho({1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}) == doctest::Approx(1.0));
  CHECK(spearman_rho({1, 2, 3, 4, 5}, {10, 8, 6, 4, 2}) == doctest::Approx(-1.0));
  // Monotone in ranks even when nonlinear in values.
  CHECK(spearman_rho({1, 2, 3, 4, 5}, {1, 8, 27, 64, 125}) == doctest::Approx(1.0));
  const double rho = spearman_rho({1, 2, 3, 4, 5, 6}, {6, 5, 4, 3, 1, 2});
  CHECK(rho < -0.8);
  CHECK_THROWS_AS((void)spearman_rho({1, 1, 1}, {1, 2, 3}), ValidationError);
}

TEST_CASE("derived trial seeds give uncorrelated trials") {
  ExperimentConfig cfg = small_experiment();
  cfg.methods = {"opdad"};
  const int trials = 60;
  std::vector<double> gaps;
  gaps.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const TrialResult result = run_trial(cfg, derive_seed(cfg.seed, t));
    gaps.push_back(result.methods.front().final_gap);
  }
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= trials;
  double num = 0.0, den = 0.0;
  for (int t = 0; t < trials; ++t) den += (gaps[t] - mean) * (gaps[t] - mean);
  for (int t = 0; t + 1 < trials; ++t) num += (gaps[t] - mean) * (gaps[t + 1] - mean);
  REQUIRE(den > 0.0);
  CHECK(std::abs(num / den) < 0.35);  // lag-1 autocorrelation across trial index
}

TEST_CASE("kappa for a stream halves the clamped complex eigengap") {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(3, 3);
  q(0, 0) = 4.0;
  q(1, 1) = 1.0;
  q(2, 2) = 0.5;
  // Raw gap 3.0 exceeds the 0.1 * mu_1 responsiveness ceiling.
  CHECK(kappa_for_stream(q) == doctest::Approx(2.0 / (0.1 * 4.0)).epsilon(1e-12));

  Eigen::MatrixXcd near_flat = Eigen::MatrixXcd::Identity(3, 3);
  near_flat(0, 0) = 1.001;
  // Raw gap 0.001 sits under the 0.05 * mu_1 floor: effective gap 0.05005.
  CHECK(kappa_for_stream(near_flat) ==
        doctest::Approx(2.0 / (0.05 * 1.001)).epsilon(1e-12));
}

TEST_CASE("bench rows and slopes behave") {
  const std::vector<BenchRow> rows = bench({"opdad", "ed"}, {16, 32, 64, 128}, 3);
  REQUIRE(rows.size() == 8);
  for (const BenchRow& row : rows) CHECK(row.seconds_per_block > 0.0);
  const double slope = bench_loglog_slope(rows, "opdad");
  CHECK(std::isfinite(slope));
  CHECK_THROWS_AS((void)bench({"opdad"}, {64, 32}, 3), ValidationError);  // not ascending

  // Per-block cost ordering at scale: tracker under the windowed baseline.
  for (int m : {64, 128}) {
    double tracker_time = 0.0, ed_time = 0.0;
    for (const BenchRow& row : rows) {
      if (row.antennas != m) continue;
      if (row.method == "opdad") tracker_time = row.seconds_per_block;
      if (row.method == "ed") ed_time = row.seconds_per_block;
    }
    CHECK(tracker_time < ed_time);
  }
}

TEST_CASE("bound verification rows are structurally sound") {
  const std::vector<BoundVerifyRow> rows = verify_bounds(5, 20, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].theorem == "theorem1");
  CHECK(rows[1].theorem == "theorem2");
  CHECK(rows[2].theorem == "theorem3");
  for (const BoundVerifyRow& row : rows) {
    CHECK(row.bound > 0.0);
    CHECK(row.empirical_mean_tan_sq >= 0.0);
    CHECK(row.pass_fraction >= 0.0);
    CHECK(row.pass_fraction <= 1.0);
  }
  // The additive residuals dominate the empirical error at these horizons.
  CHECK(rows[0].empirical_mean_tan_sq <= rows[0].bound);
}

TEST_CASE("oracle compare emits per-block gap curves") {
  ExperimentConfig cfg = small_experiment();
  cfg.scenario.jammers = 0;
  cfg.scenario.burst_count = 0;
  const std::vector<OracleCompareRow> rows = oracle_compare(cfg, 2, 50);
  REQUIRE(rows.size() == 100);
  CHECK(rows.front().block == 1);
  CHECK(rows.back().block == 50);
  for (const OracleCompareRow& row : rows) {
    CHECK(row.gap >= 0.0);
    CHECK(row.angle >= 0.0);
    CHECK(row.angle <= kPi / 2.0 + 1e-12);
  }
  // The tracker converges toward the batch direction.
  double early = 0.0, late = 0.0;
  for (const OracleCompareRow& row : rows) {
    if (row.block <= 5) early += row.gap;
    if (row.block > 45) late += row.gap;
  }
  CHECK(late < early);
}
