// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_SCENARIO_HPP
#define OPDAD_SCENARIO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "opdad/channel.hpp"
#include "opdad/common.hpp"
#include "opdad/rng.hpp"
#include "opdad/tracker.hpp"

namespace opdad {

enum class ScheduleMode { burst_markov, burst_exact_count, constant };

/// Per-jammer binary activity over the L blocks; all mass inside the target
/// window for burst modes.
struct AttackSchedule {
  std::vector<std::uint8_t> activity;  // length L, 0/1
  int window_start = 1;                // 1-based, inclusive
  int window_end = 1;
  int burst_count = 0;

  int mass() const;
  bool active(int block_index) const { return activity[block_index - 1] != 0; }
};

struct ScenarioConfig {
  int users = 10;       // K
  int jammers = 4;      // N
  int antennas = 64;    // M
  int blocks = 100;     // L
  double user_power_dbm = 10.0;
  double jammer_power_dbm = 10.0;
  double noise_power_dbm = -90.0;
  int window_start = 10;  // g
  int window_end = 50;    // h
  int burst_count = 15;   // n_r
  ScheduleMode schedule_mode = ScheduleMode::burst_markov;
  double markov_persistence = 0.7;
  bool shared_schedule = true;  // all jammers follow one schedule (coordinated)

  double user_spread = deg_to_rad(5.0);
  double jammer_spread = deg_to_rad(5.0);
  double path_loss_exponent = 3.7;
  double user_distance_min = 30.0, user_distance_max = 400.0;
  double jammer_distance_min = 100.0, jammer_distance_max = 300.0;
  double min_aoa_separation = 0.0;  // radians between user and jammer sectors
  int training_blocks = 150;

  void validate() const;
};

/// One received time block: the length-M complex snapshot, its index, and the
/// ground-truth attack label (carried for scoring only).
struct Observation {
  Eigen::VectorXcd signal;
  int block_index = 0;
  bool truth_attacked = false;

  Eigen::VectorXd real_embedded() const { return embed(signal); }
};

AttackSchedule build_schedule(const ScenarioConfig& cfg, RngStream& rng);

/// Placed emitters, their covariance factors, powers and schedules for one
/// trial. Block generation then draws fresh channels per block (block fading)
/// and superimposes users, active jammers and noise.
class Scenario {
 public:
  Scenario(const ScenarioConfig& cfg, RngStream& rng);

  const ScenarioConfig& config() const { return cfg_; }

  Observation generate_block(int block_index, RngStream& rng) const;

  /// Legitimate-only observations (all schedules forced to zero); the
  /// attackers stay silent during channel training.
  std::vector<Observation> training_phase(int n_train, RngStream& rng) const;

  std::vector<Observation> online_phase(RngStream& rng) const;

  const std::vector<AttackSchedule>& schedules() const { return schedules_; }

  /// First block whose ground truth is attacked; 0 when no attack exists.
  int first_attacked_block() const;
  bool block_attacked(int block_index) const;

  std::vector<double> user_aoas() const;
  std::vector<double> jammer_aoas() const;

  /// Population complex covariance E[y y^H] (unit-power symbols), optionally
  /// including the jammers at full activity.
  Eigen::MatrixXcd population_covariance(bool with_jammers) const;

  double received_user_power() const;    // sum_k P_k g_k
  double received_jammer_power() const;  // sum_n P_n g_n
  double noise_power() const { return noise_watts_; }

 private:
  struct Emitter {
    ChannelGeometry geometry;
    ChannelSampler sampler;
    double amplitude;  // sqrt(P * g)
    Eigen::MatrixXcd covariance;
  };

  ScenarioConfig cfg_;
  std::vector<Emitter> users_;
  std::vector<Emitter> jammers_;
  std::vector<AttackSchedule> schedules_;
  double noise_watts_;
};

}  // namespace opdad

#endif  // OPDAD_SCENARIO_HPP
