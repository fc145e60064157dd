// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_CHANNEL_HPP
#define OPDAD_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>

#include "opdad/common.hpp"
#include "opdad/rng.hpp"

namespace opdad {

enum class EmitterKind { legitimate, jammer };

/// Angular geometry of one emitter as seen from the array: mean angle of
/// arrival, angular half-spread of its scatter ring, and distance.
struct ChannelGeometry {
  double mean_aoa = 0.0;        // radians, broadside convention [-pi/2, pi/2]
  double angular_spread = 0.0;  // radians, half-width, (0, pi]
  double distance_m = 1.0;
  EmitterKind kind = EmitterKind::legitimate;

  void validate() const;
};

/// Hermitian unit-diagonal receive covariance of a one-ring scatter channel
/// on a half-wavelength uniform linear array.
class CovarianceMatrix {
 public:
  CovarianceMatrix(Eigen::MatrixXcd entries, int antenna_count);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  int antenna_count() const { return antennas_; }

  double min_eigenvalue() const;
  double hermitian_residual() const;  // max |R - R^H| entry

 private:
  Eigen::MatrixXcd entries_;
  int antennas_;
};

/// [R]_{p,q} = (1 / 2*spread) * integral over [mean-spread, mean+spread] of
/// exp(-j*(p-q)*pi*sin(theta)) d(theta). Gauss-Legendre quadrature, node
/// count doubled until every entry is stable to 1e-10.
CovarianceMatrix one_ring_covariance(const ChannelGeometry& geom, int antennas);

/// (distance / 1m)^(-exponent). Free-space normalized at 1 m.
double path_loss_gain(double distance_m, double exponent);

struct ChannelRealization {
  Eigen::VectorXcd vector;
  int block_index = 0;
};

/// Reusable factor F with F F^H = R; draws h = F z, z ~ CN(0, I_r).
/// Built by eigendecomposition with small negative eigenvalues clamped to
/// zero; rank-truncated at 1e-14 * trace.
class ChannelSampler {
 public:
  explicit ChannelSampler(const CovarianceMatrix& cov);

  Eigen::VectorXcd sample(RngStream& rng) const;
  void sample_into(Eigen::VectorXcd& out, RngStream& rng) const;

  int rank() const { return static_cast<int>(factor_.cols()); }
  const Eigen::MatrixXcd& factor() const { return factor_; }

 private:
  Eigen::MatrixXcd factor_;
};

/// One-shot draw h ~ CN(0, cov). Factorizes on every call; use ChannelSampler
/// when sampling many blocks from the same covariance.
ChannelRealization sample_channel(const CovarianceMatrix& cov, RngStream& rng,
                                  int block_index = 0);

}  // namespace opdad

#endif  // OPDAD_CHANNEL_HPP
