// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_HARNESS_HPP
#define OPDAD_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opdad/analysis.hpp"
#include "opdad/detector.hpp"
#include "opdad/oracle.hpp"
#include "opdad/scenario.hpp"

namespace opdad {

struct SweepSpec {
  std::string parameter;  // one of: n_r, P_J, N, K, M, L, P_U, epsilon
  std::vector<double> values;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  DetectorConfig detector;
  int trials = 500;
  std::uint64_t seed = 1;
  std::optional<SweepSpec> sweep;
  std::vector<std::string> methods{"opdad"};

  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Applies one sweep value to a copy of the config.
ExperimentConfig with_sweep_value(const ExperimentConfig& base, const std::string& parameter,
                                  double value);

struct MethodMetrics {
  std::string method;
  bool attacked = false;
  bool detected = false;
  int delay = -1;  // blocks from first attacked block to first true positive
  double pfa = 0.0;
  double final_gap = 0.0;  // tracker vs batch principal direction (opdad only)
  double seconds_per_block = 0.0;
};

struct TrialResult {
  int first_attacked = 0;
  std::vector<MethodMetrics> methods;
  std::vector<DetectionEvent> events;  // opdad events when requested
};

/// Deterministic given (config, trial seed): placement, training, online
/// detection and scoring for every requested method on one shared stream.
TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed,
                      bool keep_events = false);

/// Standard detector assembly: kappa from the training sample covariance
/// (unless given), random-sphere tracker init, warm-up over the training
/// blocks, centroids from the calibration tail of the training features
/// (the warm-up transient would otherwise inflate the training dispersion
/// and desensitize the deviation test). The stepsize clock runs on through
/// the online phase, so the in-subspace wander keeps decaying and the
/// calibration tail bounds the online dispersion honestly.
OnlineDetector make_online_detector(const std::vector<Observation>& training,
                                    const DetectorConfig& cfg, RngStream& init_rng,
                                    std::optional<double> kappa = std::nullopt);

struct SweepRow {
  std::string sweep_param;
  double value = 0.0;
  std::string method;
  double p_miss = 0.0;
  double avg_delay = 0.0;
  double p_fa = 0.0;
  double mean_gap = 0.0;
  double wall_time_per_block = 0.0;
  int trials = 0;
  double p_miss_se = 0.0;
  double avg_delay_se = 0.0;
};

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, int threads = 0);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct BenchRow {
  std::string method;
  int antennas = 0;
  double seconds_per_block = 0.0;
};

/// Per-method per-block wall time over synthetic streams; methods from
/// {opdad, ed, sd}.
std::vector<BenchRow> bench(const std::vector<std::string>& methods,
                            const std::vector<int>& antenna_counts,
                            std::uint64_t seed = 1);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// Least-squares slope of log(time) against log(M) for one method.
double bench_loglog_slope(const std::vector<BenchRow>& rows, const std::string& method);

struct BoundVerifyRow {
  std::string theorem;
  std::string parameters;
  double bound = 0.0;
  double empirical_mean_tan_sq = 0.0;
  double pass_fraction = 0.0;
};

/// Monte Carlo check that tracked error respects the convergence bounds on
/// synthetic stationary streams satisfying each theorem's hypotheses.
std::vector<BoundVerifyRow> verify_bounds(std::uint64_t seed, int trials_per_batch = 200,
                                          int batches = 10);
void write_bounds_csv(std::ostream& out, const std::vector<BoundVerifyRow>& rows);

struct OracleCompareRow {
  int seed_index = 0;
  int block = 0;
  double gap = 0.0;
  double angle = 0.0;
};

/// Per-block tracker-vs-DMF gap and angle curves over several seeds; the
/// reference is the batch principal direction of the whole stream, phase
/// aligned.
std::vector<OracleCompareRow> oracle_compare(const ExperimentConfig& cfg, int seeds,
                                             int blocks);
void write_oracle_csv(std::ostream& out, const std::vector<OracleCompareRow>& rows);

void write_events_csv(std::ostream& out, const std::vector<DetectionEvent>& events,
                      const std::vector<int>& truth_override = {});

/// Spearman rank correlation of two equal-length series.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

/// kappa for a physical stream from its complex covariance: the embedded
/// real stream has eigenvalues mu_i / 2 (each twice), so the effective gap
/// is (mu_1 - mu_2) / 2.
double kappa_for_stream(const Eigen::MatrixXcd& complex_covariance);

}  // namespace opdad

#endif  // OPDAD_HARNESS_HPP
