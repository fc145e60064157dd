// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_TRACKER_HPP
#define OPDAD_TRACKER_HPP

#include <Eigen/Dense>
#include <optional>

#include "opdad/common.hpp"
#include "opdad/rng.hpp"

namespace opdad {

/// Real 2Mx2M embedding [[A, -B], [B, A]] of a complex Hermitian Q = A + iB.
/// Every eigenvalue of Q appears twice in the embedding.
struct RealEmbeddedCovariance {
  Eigen::MatrixXd xi;
};

RealEmbeddedCovariance build_xi(const Eigen::MatrixXcd& q);

/// (Re y, Im y) concatenation; preserves the norm.
Eigen::VectorXd embed(const Eigen::VectorXcd& complex_vector);

/// One-sample Rayleigh quotient (v^T s s^T v) / (v^T v).
double rayleigh_quotient(const Eigen::VectorXd& v, const Eigen::VectorXd& sample);

/// Gradient of the one-sample Rayleigh quotient,
/// (2/||v||^2) (s s^T - ((v^T s s^T v)/(v^T v)) I) v.
Eigen::VectorXd gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& sample);

/// Streaming principal-direction estimate: one stochastic-gradient step per
/// arriving sample with stepsize kappa / l, renormalized to unit length
/// after every step. Updates are strictly sequential in block order.
class TrackerState {
 public:
  TrackerState(Eigen::VectorXd initial, double kappa);

  static TrackerState random_init(int dimension, double kappa, RngStream& rng);
  static TrackerState from_first_observation(const Eigen::VectorXd& observation,
                                             double kappa);

  /// v <- v + beta (s s^T - ((v^T s s^T v)/||v||^2) I) v, beta = kappa/l,
  /// then renormalize. Increments the iteration counter.
  void update(const Eigen::VectorXd& sample);

  /// Restarts the stepsize clock at the given count (the next update uses
  /// beta = kappa / (count + 1)). The detection loop owns its own clock; a
  /// warm-started detector rebases to the convergence budget instead of
  /// inheriting the decayed training-phase stepsize.
  void rebase_iteration(long count);

  const Eigen::VectorXd& estimate() const { return estimate_; }
  long iteration() const { return iteration_; }
  double kappa() const { return kappa_; }
  int dimension() const { return static_cast<int>(estimate_.size()); }

 private:
  Eigen::VectorXd estimate_;
  long iteration_ = 0;
  double kappa_;
};

inline void oja_update(TrackerState& state, const Eigen::VectorXd& sample) {
  state.update(sample);
}

/// One normalized update at an explicit stepsize; the kernel behind
/// TrackerState::update, also used directly for constant-stepsize analysis.
void oja_step(Eigen::VectorXd& v, const Eigen::VectorXd& sample, double beta);

/// kappa = 1 / eigengap. The O(1/l) rate needs kappa >= 1/(2 gap).
double kappa_from_eigengap(double eigengap);

/// Misalignment potential 1 - (v_hat . v_star) / ||v_hat||^2, with v_star
/// sign-flipped first so the inner product is non-negative; 0 iff aligned,
/// 1 iff orthogonal (for unit v_hat).
double potential(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star);

/// Elementwise ratio of the real half to the imaginary half of the tracked
/// direction, denominator clamped at 1e-12 in magnitude, renormalized to
/// unit length. The clustering feature.
struct DensityFeature {
  Eigen::VectorXd values;
  int block_index = 0;
};

DensityFeature density_feature(const Eigen::VectorXd& v_hat, int block_index = 0);

/// Differential phase profile of the tracked direction in chordal form: for
/// each consecutive antenna pair, the unit complex increment
/// t_{i+1} conj(t_i) / |.| laid out as (Re, Im) halves and normalized to
/// unit length (2(M-1) values). On a uniform linear array the increment
/// phase is the local arrival-angle slope, so directions inside one narrow
/// scatter sector stay close while a different sector shifts every
/// increment; entries are bounded, unlike the raw quotient whose cotangent
/// poles let a single antenna dominate.
DensityFeature phase_feature(const Eigen::VectorXd& v_hat, int block_index = 0);

/// In-plane representative of an embedded direction: the complex phase of
/// v_hat's complex form is rotated to maximize alignment with the reference
/// direction. Tracking metrics are invariant to this rotation; the
/// elementwise quotient feature is not (its entries are cotangents of the
/// per-antenna phases), so the detector pins the representative against the
/// end-of-training direction to keep features stationary between attacks.
Eigen::VectorXd phase_align(const Eigen::VectorXd& v_hat,
                            const Eigen::VectorXcd& reference);

/// Complex form of an embedded vector (inverse of embed()).
Eigen::VectorXcd unembed(const Eigen::VectorXd& v);

}  // namespace opdad

#endif  // OPDAD_TRACKER_HPP
