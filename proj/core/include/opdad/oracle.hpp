// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_ORACLE_HPP
#define OPDAD_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "opdad/common.hpp"
#include "opdad/scenario.hpp"

namespace opdad {

/// Brute-force principal direction: top eigenvector and full sorted spectrum
/// of a symmetric matrix or a batch sample covariance.
struct PrincipalDirectionTruth {
  Eigen::VectorXd vector;       // unit norm
  Eigen::VectorXd eigenvalues;  // sorted descending, clamped at -1e-10 * scale
  bool degenerate = false;      // eigengap numerically zero

  double eigengap() const {
    return eigenvalues.size() > 1 ? eigenvalues(0) - eigenvalues(1) : eigenvalues(0);
  }
};

PrincipalDirectionTruth dmf_principal(const Eigen::MatrixXd& symmetric);
PrincipalDirectionTruth dmf_principal(const std::vector<Eigen::VectorXd>& samples);

/// Complex counterpart used on physical streams (where the real embedding
/// carries every eigenvalue twice and "the" top real eigenvector is only
/// defined up to an in-plane rotation).
struct ComplexPrincipal {
  Eigen::VectorXcd vector;
  Eigen::VectorXd eigenvalues;  // sorted descending
  bool degenerate = false;

  double eigengap() const {
    return eigenvalues.size() > 1 ? eigenvalues(0) - eigenvalues(1) : eigenvalues(0);
  }
};

ComplexPrincipal complex_principal(const Eigen::MatrixXcd& hermitian);
Eigen::MatrixXcd complex_sample_covariance(const std::vector<Observation>& blocks);

/// Angle (radians, in [0, pi/2] after sign alignment) and the normalized gap
/// ||v_hat - v_star|| / ||v_hat|| between two unit directions.
double principal_angle(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star);
double direction_gap(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star);

/// Embedded 2-D real eigenplane of a complex direction t: spanned by
/// (Re t, Im t) and the embedding of i*t. Comparisons against a tracked real
/// direction go through the closest in-plane unit vector (phase alignment).
class EmbeddedReference {
 public:
  explicit EmbeddedReference(const Eigen::VectorXcd& complex_direction);

  /// Closest unit vector to v inside the plane.
  Eigen::VectorXd aligned_to(const Eigen::VectorXd& v) const;
  double angle_to(const Eigen::VectorXd& v) const;
  double gap_to(const Eigen::VectorXd& v) const;
  /// || (I - P) v || for the plane projector P; small iff v lies in the plane.
  double projection_residual(const Eigen::VectorXd& v) const;

 private:
  Eigen::VectorXd basis_a_, basis_b_;  // orthonormal plane basis
};

/// Energy-detector baseline: sliding-window per-antenna variance, averaged
/// over antennas, thresholded at a quantile calibrated on attack-free data.
class EnergyDetector {
 public:
  EnergyDetector(int window, double threshold);

  static EnergyDetector calibrate(const std::vector<Observation>& training,
                                  double target_pfa, int window = 10);

  /// Feeds one block; false until the window has filled.
  bool step(const Observation& obs);
  double last_statistic() const { return last_statistic_; }
  int window() const { return window_; }
  double threshold() const { return threshold_; }
  void reset();

 private:
  int window_;
  double threshold_;
  std::vector<Eigen::VectorXcd> buffer_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  double last_statistic_ = 0.0;
};

/// Per-antenna windowed variance (zero-mean model): mean |y_m|^2 over blocks.
double ed_feature(const std::vector<Observation>& window_blocks, int antenna);

/// Subspace-dimension baseline: numerical rank of the windowed complex
/// sample covariance (eigenvalues above tau_rank * lambda_max); flags a block
/// when the rank exceeds the attack-free baseline. Deliberately evaluates the
/// full MxM eigendecomposition per block.
class SubspaceDetector {
 public:
  SubspaceDetector(int window, int baseline_rank, double tau_rank = 1e-3);

  static SubspaceDetector calibrate(const std::vector<Observation>& training,
                                    int window = 10, double tau_rank = 1e-3);

  bool step(const Observation& obs);
  int last_rank() const { return last_rank_; }
  int baseline_rank() const { return baseline_rank_; }
  void reset();

 private:
  int window_;
  int baseline_rank_;
  double tau_rank_;
  std::vector<Eigen::VectorXcd> buffer_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  int last_rank_ = 0;
};

int sd_feature(const std::vector<Observation>& window_blocks, double tau_rank = 1e-3);

}  // namespace opdad

#endif  // OPDAD_ORACLE_HPP
