// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "opdad/scenario.hpp"
#include "opdad/stream_io.hpp"

using namespace opdad;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.users = 2;
  cfg.jammers = 1;
  cfg.antennas = 4;
  cfg.blocks = 20;
  cfg.window_start = 5;
  cfg.window_end = 15;
  cfg.burst_count = 4;
  cfg.training_blocks = 5;
  return cfg;
}

}  // namespace

TEST_CASE("constant schedule is all ones") {
  ScenarioConfig cfg = small_config();
  cfg.blocks = 10;
  cfg.window_end = 10;
  cfg.schedule_mode = ScheduleMode::constant;
  RngStream rng(1);
  const AttackSchedule schedule = build_schedule(cfg, rng);
  CHECK(schedule.activity.size() == 10);
  for (std::uint8_t a : schedule.activity) CHECK(a == 1);
  CHECK(schedule.mass() == 10);
}

TEST_CASE("exact-count schedules place n_r attacks inside the window") {
  ScenarioConfig cfg = small_config();
  cfg.blocks = 10;
  cfg.window_start = 2;
  cfg.window_end = 10;
  cfg.burst_count = 4;
  cfg.schedule_mode = ScheduleMode::burst_exact_count;
  RngStream rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const AttackSchedule schedule = build_schedule(cfg, rng);
    CHECK(schedule.mass() == 4);
    CHECK(schedule.activity[0] == 0);  // block 1 is outside the window
    for (int l = cfg.window_start; l <= cfg.window_end; ++l) {
      CHECK((schedule.activity[l - 1] == 0 || schedule.activity[l - 1] == 1));
    }
  }
}

TEST_CASE("markov schedules match the expected attack count") {
  ScenarioConfig cfg = small_config();
  cfg.blocks = 100;
  cfg.window_start = 10;
  cfg.window_end = 50;
  cfg.burst_count = 15;
  cfg.schedule_mode = ScheduleMode::burst_markov;
  RngStream rng(3);
  double total = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const AttackSchedule schedule = build_schedule(cfg, rng);
    total += schedule.mass();
    for (int l = 1; l < cfg.window_start; ++l) CHECK(schedule.activity[l - 1] == 0);
    for (int l = cfg.window_end + 1; l <= cfg.blocks; ++l) {
      CHECK(schedule.activity[l - 1] == 0);
    }
  }
  const double mean_mass = total / draws;
  CHECK(mean_mass == doctest::Approx(15.0).epsilon(0.05));
}

TEST_CASE("degenerate schedules") {
  ScenarioConfig cfg = small_config();
  cfg.burst_count = 0;
  RngStream rng(4);
  const AttackSchedule schedule = build_schedule(cfg, rng);
  CHECK(schedule.mass() == 0);

  cfg.burst_count = cfg.window_end - cfg.window_start + 2;  // too many
  CHECK_THROWS_AS((void)build_schedule(cfg, rng), ValidationError);
}

TEST_CASE("config validation") {
  ScenarioConfig cfg = small_config();
  cfg.window_start = 16;  // > window_end
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.antennas = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.blocks = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.users = 0;
  cfg.jammers = 0;  // noise-only scenarios are legal
  cfg.validate();
}

TEST_CASE("noise-only blocks carry the configured noise power") {
  ScenarioConfig cfg = small_config();
  cfg.users = 0;
  cfg.jammers = 0;
  cfg.noise_power_dbm = -20.0;
  RngStream rng(5);
  const Scenario scenario(cfg, rng);
  const double expected = dbm_to_watts(-20.0);
  double power = 0.0;
  const int blocks = 10000;
  for (int l = 0; l < blocks; ++l) {
    const Observation obs = scenario.generate_block(1 + (l % cfg.blocks), rng);
    CHECK_FALSE(obs.truth_attacked);
    power += obs.signal.squaredNorm() / cfg.antennas;
  }
  power /= blocks;
  CHECK(power == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("single narrow user without noise gives collinear observations") {
  ScenarioConfig cfg = small_config();
  cfg.users = 1;
  cfg.jammers = 0;
  cfg.user_spread = 1e-8;
  cfg.noise_power_dbm = -400.0;  // effectively noiseless
  RngStream rng(6);
  const Scenario scenario(cfg, rng);
  Observation first = scenario.generate_block(1, rng);
  const Eigen::VectorXcd reference = first.signal / first.signal.norm();
  for (int l = 2; l <= 20; ++l) {
    const Observation obs = scenario.generate_block(l, rng);
    const Eigen::VectorXcd h = obs.signal / obs.signal.norm();
    const Eigen::VectorXcd residual = h - reference * reference.dot(h);
    CHECK(residual.norm() < 1e-6);
  }
}

TEST_CASE("per-antenna power accounts for users, jammers and noise") {
  ScenarioConfig cfg = small_config();
  cfg.users = 2;
  cfg.jammers = 2;
  cfg.schedule_mode = ScheduleMode::constant;
  cfg.noise_power_dbm = -80.0;
  cfg.user_power_dbm = 10.0;
  cfg.jammer_power_dbm = 12.0;
  RngStream rng(7);
  const Scenario scenario(cfg, rng);
  const double expected = scenario.received_user_power() +
                          scenario.received_jammer_power() + scenario.noise_power();
  double power = 0.0;
  const int blocks = 10000;
  for (int l = 0; l < blocks; ++l) {
    const Observation obs = scenario.generate_block(1 + (l % cfg.blocks), rng);
    CHECK(obs.truth_attacked);
    power += obs.signal.squaredNorm() / cfg.antennas;
  }
  power /= blocks;
  CHECK(power == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("training phase is attack-free") {
  ScenarioConfig cfg = small_config();
  cfg.schedule_mode = ScheduleMode::constant;  // jammers always on otherwise
  RngStream rng(8);
  const Scenario scenario(cfg, rng);
  const std::vector<Observation> training = scenario.training_phase(50, rng);
  CHECK(training.size() == 50);
  for (const Observation& obs : training) CHECK_FALSE(obs.truth_attacked);

  // Mean power excludes the jammer term.
  double power = 0.0;
  const std::vector<Observation> more = scenario.training_phase(5000, rng);
  for (const Observation& obs : more) power += obs.signal.squaredNorm() / cfg.antennas;
  power /= static_cast<double>(more.size());
  const double expected = scenario.received_user_power() + scenario.noise_power();
  CHECK(power == doctest::Approx(expected).epsilon(0.05));

  CHECK(scenario.training_phase(1, rng).size() == 1);  // single-block training is legal
  CHECK_THROWS_AS((void)scenario.training_phase(0, rng), ValidationError);
}

TEST_CASE("real embedding preserves the norm of every observation") {
  ScenarioConfig cfg = small_config();
  RngStream rng(9);
  const Scenario scenario(cfg, rng);
  for (int l = 1; l <= 20; ++l) {
    const Observation obs = scenario.generate_block(l, rng);
    const Eigen::VectorXd real = obs.real_embedded();
    CHECK(std::abs(real.squaredNorm() - obs.signal.squaredNorm()) <=
          1e-12 * std::max(1.0, obs.signal.squaredNorm()));
  }
}

TEST_CASE("blocks are uncorrelated across time") {
  ScenarioConfig cfg = small_config();
  cfg.users = 1;
  cfg.jammers = 0;
  cfg.antennas = 2;
  RngStream rng(10);
  const Scenario scenario(cfg, rng);
  const int blocks = 10000;
  std::vector<double> a(blocks), b(blocks);
  for (int l = 0; l < blocks; ++l) {
    const Observation obs = scenario.generate_block(1 + (l % cfg.blocks), rng);
    a[l] = obs.signal(0).real();
  }
  // Lag-1 correlation.
  double num = 0.0, mean = 0.0, var = 0.0;
  for (double v : a) mean += v;
  mean /= blocks;
  for (double v : a) var += (v - mean) * (v - mean);
  for (int l = 0; l + 1 < blocks; ++l) num += (a[l] - mean) * (a[l + 1] - mean);
  CHECK(std::abs(num / var) < 0.05);
  (void)b;
}

TEST_CASE("identical seeds reproduce identical observations") {
  ScenarioConfig cfg = small_config();
  RngStream r1(11), r2(11);
  const Scenario s1(cfg, r1);
  const Scenario s2(cfg, r2);
  const Observation o1 = s1.generate_block(3, r1);
  const Observation o2 = s2.generate_block(3, r2);
  for (int i = 0; i < cfg.antennas; ++i) CHECK(o1.signal(i) == o2.signal(i));
}

TEST_CASE("independent schedules differ across jammers") {
  ScenarioConfig cfg = small_config();
  cfg.jammers = 6;
  cfg.blocks = 60;
  cfg.window_start = 5;
  cfg.window_end = 55;
  cfg.burst_count = 20;
  cfg.shared_schedule = false;
  RngStream rng(21);
  const Scenario scenario(cfg, rng);
  REQUIRE(scenario.schedules().size() == 6);
  bool any_difference = false;
  for (std::size_t n = 1; n < scenario.schedules().size(); ++n) {
    if (scenario.schedules()[n].activity != scenario.schedules()[0].activity) {
      any_difference = true;
    }
  }
  CHECK(any_difference);

  cfg.shared_schedule = true;
  RngStream rng2(21);
  const Scenario coordinated(cfg, rng2);
  for (const AttackSchedule& schedule : coordinated.schedules()) {
    CHECK(schedule.activity == coordinated.schedules()[0].activity);
  }
}

TEST_CASE("minimum AoA separation keeps jammers away from user sectors") {
  ScenarioConfig cfg = small_config();
  cfg.users = 3;
  cfg.jammers = 4;
  cfg.min_aoa_separation = deg_to_rad(15.0);
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng(300 + trial);
    const Scenario scenario(cfg, rng);
    for (double jam : scenario.jammer_aoas()) {
      for (double user : scenario.user_aoas()) {
        CHECK(std::abs(jam - user) >= cfg.min_aoa_separation);
      }
    }
  }
}

TEST_CASE("observation stream file round trip") {
  ScenarioConfig cfg = small_config();
  RngStream rng(12);
  const Scenario scenario(cfg, rng);
  std::vector<Observation> blocks;
  for (int l = 1; l <= 6; ++l) blocks.push_back(scenario.generate_block(l, rng));

  std::stringstream buffer;
  write_observation_stream(buffer, blocks, cfg.antennas);

  // Header layout: magic, version u16, M u16, L u32, reserved u32.
  const std::string raw = buffer.str();
  REQUIRE(raw.size() == 16 + 6 * cfg.antennas * 8);
  CHECK(raw.substr(0, 4) == "OPDD");
  CHECK(static_cast<unsigned char>(raw[4]) == 1);
  CHECK(static_cast<unsigned char>(raw[6]) == cfg.antennas);
  CHECK(static_cast<unsigned char>(raw[8]) == 6);

  const ObservationStream stream = read_observation_stream(buffer);
  CHECK(stream.antennas == cfg.antennas);
  REQUIRE(stream.blocks.size() == blocks.size());
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    for (int i = 0; i < cfg.antennas; ++i) {
      // float32 storage: relative error bounded by single precision.
      CHECK(std::abs(stream.blocks[l](i) - blocks[l].signal(i)) <=
            1e-6 * std::abs(blocks[l].signal(i)) + 1e-30);
    }
  }
}

TEST_CASE("stream reader rejects foreign bytes") {
  std::stringstream buffer;
  buffer << "not an observation stream";
  CHECK_THROWS_AS((void)read_observation_stream(buffer), ValidationError);
}
