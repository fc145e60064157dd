// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opdad {
namespace {

Eigen::VectorXd normalized_or_zero(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::VectorXd(v / norm) : v;
}

}  // namespace

Centroids Centroids::init(const std::vector<DensityFeature>& training_features) {
  require(!training_features.empty(), "centroid initialization needs training features");
  Centroids c;
  c.sum0_ = Eigen::VectorXd::Zero(training_features.front().values.size());
  for (const DensityFeature& f : training_features) {
    require(f.values.size() == c.sum0_.size(), "training feature dimension mismatch");
    c.sum0_ += f.values;
  }
  c.count0_ = static_cast<long>(training_features.size());
  c.phi0_unit_ = normalized_or_zero(c.sum0_);
  double dispersion = 0.0;
  for (const DensityFeature& f : training_features) {
    dispersion += (f.values - c.phi0_unit_).norm();
  }
  c.sigma_train_ = dispersion / static_cast<double>(training_features.size());
  return c;
}

const Eigen::VectorXd& Centroids::jamming() const {
  require(count1_ > 0, "jamming centroid does not exist yet");
  return phi1_unit_;
}

void Centroids::absorb_normal(const Eigen::VectorXd& feature) {
  sum0_ += feature;
  ++count0_;
  phi0_unit_ = normalized_or_zero(sum0_);
}

void Centroids::absorb_jamming(const Eigen::VectorXd& feature) {
  if (count1_ == 0) {
    sum1_ = feature;
    count1_ = 1;
  } else {
    sum1_ += feature;
    ++count1_;
  }
  phi1_unit_ = normalized_or_zero(sum1_);
}

DetectionEvent classify_block(const DensityFeature& feature, Centroids& centroids,
                              const DetectorConfig& cfg) {
  cfg.validate();
  require(centroids.normal_count() > 0, "centroids are not initialized");

  DetectionEvent event;
  event.block_index = feature.block_index;
  event.deviation = (feature.values - centroids.normal()).norm();

  if (centroids.has_jamming()) {
    const double dist1 = (feature.values - centroids.jamming()).norm();
    if (event.deviation == 0.0) {
      event.ratio = 0.0;
    } else if (dist1 == 0.0) {
      event.ratio = std::numeric_limits<double>::infinity();
    } else {
      event.ratio = event.deviation / dist1;
    }
    event.decision = event.ratio <= cfg.epsilon ? Decision::normal : Decision::jamming;
  } else {
    event.ratio = std::numeric_limits<double>::quiet_NaN();
    const double threshold = cfg.bootstrap_dev_multiplier * centroids.training_dispersion();
    event.decision =
        event.deviation > threshold ? Decision::jamming : Decision::normal;
  }

  if (event.decision == Decision::normal) {
    centroids.absorb_normal(feature.values);
  } else {
    centroids.absorb_jamming(feature.values);  // phi0 stays frozen
  }
  return event;
}

double calibrate_epsilon(const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                         const std::vector<DensityFeature>& clean_eval,
                         double target_pfa) {
  require(target_pfa >= 0.0 && target_pfa < 1.0, "target_pfa must lie in [0, 1)");
  require(clean_eval.size() >= 100,
          "epsilon calibration needs at least 100 evaluation blocks");
  std::vector<double> ratios;
  ratios.reserve(clean_eval.size());
  for (const DensityFeature& f : clean_eval) {
    const double d0 = (f.values - phi0).norm();
    const double d1 = (f.values - phi1).norm();
    ratios.push_back(d1 > 0.0 ? d0 / d1 : std::numeric_limits<double>::infinity());
  }
  std::sort(ratios.begin(), ratios.end());
  const auto n = ratios.size();
  // (1 - p) quantile as an order statistic; p = 0 returns the maximum.
  auto index = static_cast<std::size_t>(std::ceil((1.0 - target_pfa) * n)) - 1;
  index = std::min(index, n - 1);
  return ratios[index];
}

OnlineDetector::OnlineDetector(TrackerState tracker, Centroids centroids,
                               DetectorConfig cfg)
    : tracker_(std::move(tracker)), centroids_(std::move(centroids)), cfg_(cfg) {
  cfg_.validate();
}

OnlineDetector::OnlineDetector(TrackerState tracker, Centroids centroids,
                               DetectorConfig cfg, Eigen::VectorXcd phase_reference)
    : tracker_(std::move(tracker)),
      centroids_(std::move(centroids)),
      cfg_(cfg),
      phase_reference_(std::move(phase_reference)) {
  cfg_.validate();
}

DetectionEvent OnlineDetector::step(const Observation& obs) {
  tracker_.update(obs.real_embedded());
  const Eigen::VectorXd representative =
      phase_reference_.size() > 0 ? phase_align(tracker_.estimate(), phase_reference_)
                                  : tracker_.estimate();
  DensityFeature feature = cfg_.feature_mode == FeatureMode::phase
                               ? phase_feature(representative, obs.block_index)
                               : density_feature(representative, obs.block_index);
  DetectionEvent event = classify_block(feature, centroids_, cfg_);
  event.truth_attacked = obs.truth_attacked;
  return event;
}

std::vector<DetectionEvent> run_online(const std::vector<Observation>& observations,
                                       OnlineDetector& detector) {
  require(!observations.empty(), "observation stream is empty");
  std::vector<DetectionEvent> events;
  events.reserve(observations.size());
  for (const Observation& obs : observations) {
    events.push_back(detector.step(obs));
  }
  return events;
}

ReclusterResult recluster(const std::vector<DensityFeature>& features,
                          const Eigen::VectorXd& phi0_seed,
                          const Eigen::VectorXd& phi1_seed, int max_iterations) {
  require(!features.empty(), "recluster needs features");
  ReclusterResult result;
  result.phi0 = phi0_seed;
  result.phi1 = phi1_seed;
  result.assignment.assign(features.size(), 0);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double d0 = (features[i].values - result.phi0).squaredNorm();
      const double d1 = (features[i].values - result.phi1).squaredNorm();
      const int assign = d1 < d0 ? 1 : 0;
      if (assign != result.assignment[i]) {
        result.assignment[i] = assign;
        changed = true;
      }
    }
    Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(result.phi0.size());
    Eigen::VectorXd sum1 = Eigen::VectorXd::Zero(result.phi1.size());
    long n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (result.assignment[i] == 0) {
        sum0 += features[i].values;
        ++n0;
      } else {
        sum1 += features[i].values;
        ++n1;
      }
    }
    if (n0 > 0) result.phi0 = sum0 / static_cast<double>(n0);
    if (n1 > 0) result.phi1 = sum1 / static_cast<double>(n1);
    if (!changed && iter > 0) break;
  }

  result.objective = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::VectorXd& phi = result.assignment[i] == 0 ? result.phi0 : result.phi1;
    result.objective += (features[i].values - phi).squaredNorm();
  }
  return result;
}

}  // namespace opdad
