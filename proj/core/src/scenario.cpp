// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/scenario.hpp"

#include <algorithm>
#include <numeric>

namespace opdad {

int AttackSchedule::mass() const {
  return std::accumulate(activity.begin(), activity.end(), 0);
}

void ScenarioConfig::validate() const {
  require(users >= 0, "K must be non-negative");
  require(jammers >= 0, "N must be non-negative");
  require(antennas >= 1, "M must be positive");
  require(blocks >= 1, "L must be positive");
  require(window_start >= 1 && window_start <= window_end && window_end <= blocks,
          "attack window must satisfy 1 <= g <= h <= L");
  const int window_len = window_end - window_start + 1;
  require(burst_count >= 0 && burst_count <= window_len,
          "n_r must fit inside the attack window");
  require(markov_persistence >= 0.0 && markov_persistence < 1.0,
          "markov persistence must lie in [0, 1)");
  require(user_spread > 0.0 && user_spread <= kPi, "user angular spread out of range");
  require(jammer_spread > 0.0 && jammer_spread <= kPi,
          "jammer angular spread out of range");
  require(path_loss_exponent > 0.0, "path loss exponent must be positive");
  require(user_distance_min > 0.0 && user_distance_min <= user_distance_max,
          "user deployment annulus is empty");
  require(jammer_distance_min > 0.0 && jammer_distance_min <= jammer_distance_max,
          "jammer deployment annulus is empty");
  require(training_blocks >= 1, "training phase needs at least one block");
  require(min_aoa_separation >= 0.0, "minimum AoA separation must be non-negative");
}

AttackSchedule build_schedule(const ScenarioConfig& cfg, RngStream& rng) {
  cfg.validate();
  AttackSchedule schedule;
  schedule.activity.assign(cfg.blocks, 0);

  if (cfg.schedule_mode == ScheduleMode::constant) {
    schedule.window_start = 1;
    schedule.window_end = cfg.blocks;
    schedule.burst_count = cfg.blocks;
    std::fill(schedule.activity.begin(), schedule.activity.end(), std::uint8_t{1});
    return schedule;
  }

  schedule.window_start = cfg.window_start;
  schedule.window_end = cfg.window_end;
  schedule.burst_count = cfg.burst_count;
  const int window_len = cfg.window_end - cfg.window_start + 1;
  if (cfg.burst_count == 0) return schedule;

  if (cfg.schedule_mode == ScheduleMode::burst_exact_count) {
    // Exactly n_r attacked blocks, placed uniformly without replacement.
    std::vector<int> positions(window_len);
    std::iota(positions.begin(), positions.end(), cfg.window_start);
    for (int i = 0; i < cfg.burst_count; ++i) {
      const int j = i + static_cast<int>(rng.below(positions.size() - i));
      std::swap(positions[i], positions[j]);
      schedule.activity[positions[i] - 1] = 1;
    }
    return schedule;
  }

  // Two-state Markov chain inside the window with stationary on-probability
  // p_on = n_r / window length; persistence q interpolates between i.i.d.
  // (q = 0) and frozen (q -> 1) while keeping the stationary law fixed.
  const double p_on = static_cast<double>(cfg.burst_count) / window_len;
  const double q = cfg.markov_persistence;
  const double stay_on = q + (1.0 - q) * p_on;
  const double stay_off = q + (1.0 - q) * (1.0 - p_on);
  bool on = rng.uniform() < p_on;
  schedule.activity[cfg.window_start - 1] = on ? 1 : 0;
  for (int l = cfg.window_start + 1; l <= cfg.window_end; ++l) {
    const double stay = on ? stay_on : stay_off;
    if (rng.uniform() >= stay) on = !on;
    schedule.activity[l - 1] = on ? 1 : 0;
  }
  return schedule;
}

namespace {

double random_mean_aoa(RngStream& rng) { return rng.uniform(-kPi / 2.0, kPi / 2.0); }

// Uniform over the annulus area, not over the radius.
double annulus_distance(double lo, double hi, RngStream& rng) {
  const double u = rng.uniform();
  return std::sqrt(lo * lo + u * (hi * hi - lo * lo));
}

}  // namespace

Scenario::Scenario(const ScenarioConfig& cfg, RngStream& rng) : cfg_(cfg) {
  cfg_.validate();
  noise_watts_ = dbm_to_watts(cfg_.noise_power_dbm);

  const double user_watts = dbm_to_watts(cfg_.user_power_dbm);
  const double jammer_watts = dbm_to_watts(cfg_.jammer_power_dbm);

  std::vector<double> user_aoas;
  users_.reserve(cfg_.users);
  for (int k = 0; k < cfg_.users; ++k) {
    ChannelGeometry geom;
    geom.mean_aoa = random_mean_aoa(rng);
    geom.angular_spread = cfg_.user_spread;
    geom.distance_m = annulus_distance(cfg_.user_distance_min, cfg_.user_distance_max, rng);
    geom.kind = EmitterKind::legitimate;
    CovarianceMatrix cov = one_ring_covariance(geom, cfg_.antennas);
    const double gain = path_loss_gain(geom.distance_m, cfg_.path_loss_exponent);
    users_.push_back(Emitter{geom, ChannelSampler(cov), std::sqrt(user_watts * gain),
                             cov.entries()});
    user_aoas.push_back(geom.mean_aoa);
  }

  jammers_.reserve(cfg_.jammers);
  for (int n = 0; n < cfg_.jammers; ++n) {
    ChannelGeometry geom;
    geom.angular_spread = cfg_.jammer_spread;
    geom.kind = EmitterKind::jammer;
    // Optional minimum angular separation from every legitimate sector.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      geom.mean_aoa = random_mean_aoa(rng);
      if (cfg_.min_aoa_separation <= 0.0) break;
      bool clear = true;
      for (double aoa : user_aoas) {
        if (std::abs(aoa - geom.mean_aoa) < cfg_.min_aoa_separation) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    geom.distance_m =
        annulus_distance(cfg_.jammer_distance_min, cfg_.jammer_distance_max, rng);
    CovarianceMatrix cov = one_ring_covariance(geom, cfg_.antennas);
    const double gain = path_loss_gain(geom.distance_m, cfg_.path_loss_exponent);
    jammers_.push_back(Emitter{geom, ChannelSampler(cov), std::sqrt(jammer_watts * gain),
                               cov.entries()});
  }

  if (cfg_.jammers > 0) {
    if (cfg_.shared_schedule) {
      AttackSchedule shared = build_schedule(cfg_, rng);
      schedules_.assign(cfg_.jammers, shared);
    } else {
      schedules_.reserve(cfg_.jammers);
      for (int n = 0; n < cfg_.jammers; ++n) schedules_.push_back(build_schedule(cfg_, rng));
    }
  }
}

Observation Scenario::generate_block(int block_index, RngStream& rng) const {
  require(block_index >= 1, "block index must be >= 1");
  Observation obs;
  obs.block_index = block_index;
  obs.signal = Eigen::VectorXcd::Zero(cfg_.antennas);

  thread_local Eigen::VectorXcd channel;
  for (const Emitter& user : users_) {
    user.sampler.sample_into(channel, rng);
    const std::complex<double> symbol = rng.cgaussian();  // zero-mean unit power
    obs.signal.noalias() += (user.amplitude * symbol) * channel;
  }
  for (std::size_t n = 0; n < jammers_.size(); ++n) {
    const bool active = block_index <= cfg_.blocks && schedules_[n].active(block_index);
    if (!active) continue;
    obs.truth_attacked = true;
    jammers_[n].sampler.sample_into(channel, rng);
    const std::complex<double> symbol = rng.cgaussian();  // noise-like jamming
    obs.signal.noalias() += (jammers_[n].amplitude * symbol) * channel;
  }
  if (noise_watts_ > 0.0) {
    const double sigma = std::sqrt(noise_watts_);
    for (int i = 0; i < cfg_.antennas; ++i) obs.signal(i) += sigma * rng.cgaussian();
  }
  return obs;
}

std::vector<Observation> Scenario::training_phase(int n_train, RngStream& rng) const {
  require(n_train >= 1, "training phase needs at least one block");
  std::vector<Observation> out;
  out.reserve(n_train);
  thread_local Eigen::VectorXcd channel;
  for (int l = 1; l <= n_train; ++l) {
    Observation obs;
    obs.block_index = l;
    obs.truth_attacked = false;
    obs.signal = Eigen::VectorXcd::Zero(cfg_.antennas);
    for (const Emitter& user : users_) {
      user.sampler.sample_into(channel, rng);
      const std::complex<double> symbol = rng.cgaussian();
      obs.signal.noalias() += (user.amplitude * symbol) * channel;
    }
    if (noise_watts_ > 0.0) {
      const double sigma = std::sqrt(noise_watts_);
      for (int i = 0; i < cfg_.antennas; ++i) obs.signal(i) += sigma * rng.cgaussian();
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<Observation> Scenario::online_phase(RngStream& rng) const {
  std::vector<Observation> out;
  out.reserve(cfg_.blocks);
  for (int l = 1; l <= cfg_.blocks; ++l) out.push_back(generate_block(l, rng));
  return out;
}

int Scenario::first_attacked_block() const {
  for (int l = 1; l <= cfg_.blocks; ++l) {
    if (block_attacked(l)) return l;
  }
  return 0;
}

bool Scenario::block_attacked(int block_index) const {
  for (const AttackSchedule& schedule : schedules_) {
    if (schedule.active(block_index)) return true;
  }
  return false;
}

std::vector<double> Scenario::user_aoas() const {
  std::vector<double> out;
  out.reserve(users_.size());
  for (const Emitter& user : users_) out.push_back(user.geometry.mean_aoa);
  return out;
}

std::vector<double> Scenario::jammer_aoas() const {
  std::vector<double> out;
  out.reserve(jammers_.size());
  for (const Emitter& jammer : jammers_) out.push_back(jammer.geometry.mean_aoa);
  return out;
}

Eigen::MatrixXcd Scenario::population_covariance(bool with_jammers) const {
  Eigen::MatrixXcd q = noise_watts_ *
      Eigen::MatrixXcd::Identity(cfg_.antennas, cfg_.antennas);
  for (const Emitter& user : users_) {
    q += (user.amplitude * user.amplitude) * user.covariance;
  }
  if (with_jammers) {
    for (const Emitter& jammer : jammers_) {
      q += (jammer.amplitude * jammer.amplitude) * jammer.covariance;
    }
  }
  return q;
}

double Scenario::received_user_power() const {
  double total = 0.0;
  for (const Emitter& user : users_) total += user.amplitude * user.amplitude;
  return total;
}

double Scenario::received_jammer_power() const {
  double total = 0.0;
  for (const Emitter& jammer : jammers_) total += jammer.amplitude * jammer.amplitude;
  return total;
}

}  // namespace opdad
