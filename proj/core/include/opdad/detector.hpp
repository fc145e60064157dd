// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_DETECTOR_HPP
#define OPDAD_DETECTOR_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "opdad/scenario.hpp"
#include "opdad/tracker.hpp"

namespace opdad {

/// Which function of the tracked direction feeds the clustering stage. The
/// elementwise quotient is the literal ratio of real to imaginary halves;
/// the per-antenna phase form is bounded and stays stable when an antenna's
/// phase passes near a quotient pole, so it is the shipped default.
enum class FeatureMode { quotient, phase };

struct DetectorConfig {
  double epsilon = 0.13;
  double target_pfa = 0.05;
  double bootstrap_dev_multiplier = 3.0;
  FeatureMode feature_mode = FeatureMode::phase;

  void validate() const {
    require(epsilon > 0.0, "epsilon must be positive");
    require(target_pfa > 0.0 && target_pfa < 1.0, "target_pfa must lie in (0, 1)");
    require(bootstrap_dev_multiplier > 0.0, "bootstrap multiplier must be positive");
  }
};

/// Running class centroids over density features. The normal-class centroid
/// phi0 exists from initialization; the jamming-class centroid phi1 is
/// spawned by the first anomaly. Running means are kept as accumulated sums
/// so any processing order reproduces the batch mean; the unit-normalized
/// means are used for distances.
class Centroids {
 public:
  static Centroids init(const std::vector<DensityFeature>& training_features);

  const Eigen::VectorXd& normal() const { return phi0_unit_; }
  bool has_jamming() const { return count1_ > 0; }
  const Eigen::VectorXd& jamming() const;

  double training_dispersion() const { return sigma_train_; }
  long normal_count() const { return count0_; }
  long jamming_count() const { return count1_; }

  void absorb_normal(const Eigen::VectorXd& feature);
  void absorb_jamming(const Eigen::VectorXd& feature);  // spawns phi1 when absent

 private:
  Eigen::VectorXd sum0_, phi0_unit_;
  Eigen::VectorXd sum1_, phi1_unit_;
  long count0_ = 0, count1_ = 0;
  double sigma_train_ = 0.0;
};

enum class Decision { normal, jamming };

struct DetectionEvent {
  int block_index = 0;
  Decision decision = Decision::normal;
  double ratio = 0.0;      // ||v^d - phi0|| / ||v^d - phi1||; NaN before phi1 exists
  double deviation = 0.0;  // ||v^d - phi0||
  bool truth_attacked = false;
};

/// Algorithm-1 per-block rule. With both centroids present the block is
/// normal iff ||f - phi0|| / ||f - phi1|| <= epsilon (ratio 0/0 counts as
/// normal, x/0 as jamming). Before phi1 exists, a deviation beyond
/// bootstrap_dev_multiplier * sigma_train declares jamming and spawns phi1.
/// The decided class's centroid absorbs the feature; phi0 is frozen on
/// jamming decisions.
DetectionEvent classify_block(const DensityFeature& feature, Centroids& centroids,
                              const DetectorConfig& cfg);

/// (1 - target_pfa) quantile of the ratio statistic over jamming-free
/// evaluation features; needs at least 100 of them.
double calibrate_epsilon(const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                         const std::vector<DensityFeature>& clean_eval,
                         double target_pfa);

/// Tracker + centroids driven one observation at a time:
/// embed -> oja update -> density feature -> classify. Constant state.
/// Features are computed on the in-plane representative phase-aligned to a
/// fixed reference direction (normally the end-of-training estimate), which
/// keeps them stationary between attacks; see phase_align().
class OnlineDetector {
 public:
  OnlineDetector(TrackerState tracker, Centroids centroids, DetectorConfig cfg);
  OnlineDetector(TrackerState tracker, Centroids centroids, DetectorConfig cfg,
                 Eigen::VectorXcd phase_reference);

  DetectionEvent step(const Observation& obs);

  const TrackerState& tracker() const { return tracker_; }
  const Centroids& centroids() const { return centroids_; }
  const Eigen::VectorXcd& phase_reference() const { return phase_reference_; }
  const DetectorConfig& config() const { return cfg_; }

 private:
  TrackerState tracker_;
  Centroids centroids_;
  DetectorConfig cfg_;
  Eigen::VectorXcd phase_reference_;  // empty: use the raw estimate
};

std::vector<DetectionEvent> run_online(const std::vector<Observation>& observations,
                                       OnlineDetector& detector);

/// Offline two-centroid alternating minimization of the clustering objective
/// sum_j sum_{f in C_j} ||f - phi_j||^2; for re-analysis of a stored feature
/// set. Returns the two centroids and per-feature assignments (0 = normal).
struct ReclusterResult {
  Eigen::VectorXd phi0, phi1;
  std::vector<int> assignment;
  double objective = 0.0;
};

ReclusterResult recluster(const std::vector<DensityFeature>& features,
                          const Eigen::VectorXd& phi0_seed,
                          const Eigen::VectorXd& phi1_seed, int max_iterations = 100);

}  // namespace opdad

#endif  // OPDAD_DETECTOR_HPP
