// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/tracker.hpp"

namespace opdad {

RealEmbeddedCovariance build_xi(const Eigen::MatrixXcd& q) {
  const auto m = q.rows();
  require(q.cols() == m, "build_xi needs a square matrix");
  const double scale = std::max(q.cwiseAbs().maxCoeff(), 1.0);
  if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalError("build_xi: input is not Hermitian");
  }
  // Symmetrize so the embedding is exactly symmetric under round-off.
  Eigen::MatrixXd a = 0.5 * (q.real() + q.real().transpose());
  Eigen::MatrixXd b = 0.5 * (q.imag() - q.imag().transpose());
  RealEmbeddedCovariance out;
  out.xi.resize(2 * m, 2 * m);
  out.xi.topLeftCorner(m, m) = a;
  out.xi.topRightCorner(m, m) = -b;
  out.xi.bottomLeftCorner(m, m) = b;
  out.xi.bottomRightCorner(m, m) = a;
  return out;
}

Eigen::VectorXd embed(const Eigen::VectorXcd& complex_vector) {
  const auto m = complex_vector.size();
  Eigen::VectorXd out(2 * m);
  out.head(m) = complex_vector.real();
  out.tail(m) = complex_vector.imag();
  return out;
}

double rayleigh_quotient(const Eigen::VectorXd& v, const Eigen::VectorXd& sample) {
  const double norm_sq = v.squaredNorm();
  require(norm_sq > 0.0, "rayleigh_quotient: zero vector");
  const double proj = v.dot(sample);
  return proj * proj / norm_sq;
}

Eigen::VectorXd gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& sample) {
  const double norm_sq = v.squaredNorm();
  require(norm_sq > 0.0, "gradient: zero vector");
  const double proj = v.dot(sample);
  return (2.0 / norm_sq) * (proj * sample - (proj * proj / norm_sq) * v);
}

TrackerState::TrackerState(Eigen::VectorXd initial, double kappa)
    : estimate_(std::move(initial)), kappa_(kappa) {
  require(estimate_.size() > 0, "tracker needs a non-empty initial estimate");
  const double norm = estimate_.norm();
  require(norm > 0.0, "tracker initial estimate must be non-zero");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be finite and non-negative");
  estimate_ /= norm;
}

TrackerState TrackerState::random_init(int dimension, double kappa, RngStream& rng) {
  require(dimension >= 1, "tracker dimension must be positive");
  Eigen::VectorXd v(dimension);
  for (int i = 0; i < dimension; ++i) v(i) = rng.gaussian();
  return TrackerState(std::move(v), kappa);
}

TrackerState TrackerState::from_first_observation(const Eigen::VectorXd& observation,
                                                  double kappa) {
  return TrackerState(observation, kappa);
}

void oja_step(Eigen::VectorXd& v, const Eigen::VectorXd& sample, double beta) {
  require(sample.size() == v.size(), "sample dimension mismatch");
  if (!sample.allFinite()) throw NumericalError("oja update: non-finite sample");
  const double proj = v.dot(sample);
  const double norm_sq = v.squaredNorm();
  v += beta * (proj * sample - (proj * proj / norm_sq) * v);
  v /= v.norm();
}

void TrackerState::update(const Eigen::VectorXd& sample) {
  const double beta = kappa_ / static_cast<double>(iteration_ + 1);
  oja_step(estimate_, sample, beta);
  ++iteration_;
}

void TrackerState::rebase_iteration(long count) {
  require(count >= 0, "iteration count must be non-negative");
  iteration_ = count;
}

double kappa_from_eigengap(double eigengap) {
  require(eigengap > 0.0, "eigengap must be positive");
  return 1.0 / eigengap;
}

double potential(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star) {
  const double norm_sq = v_hat.squaredNorm();
  require(norm_sq > 0.0 && v_star.squaredNorm() > 0.0, "potential: zero vector");
  const double aligned = std::abs(v_hat.dot(v_star));
  return 1.0 - aligned / norm_sq;
}

Eigen::VectorXcd unembed(const Eigen::VectorXd& v) {
  const auto dim = v.size();
  require(dim >= 2 && dim % 2 == 0, "unembed needs an even-length vector");
  const auto m = dim / 2;
  Eigen::VectorXcd out(m);
  out.real() = v.head(m);
  out.imag() = v.tail(m);
  return out;
}

Eigen::VectorXd phase_align(const Eigen::VectorXd& v_hat,
                            const Eigen::VectorXcd& reference) {
  const Eigen::VectorXcd t = unembed(v_hat);
  require(t.size() == reference.size(), "phase_align dimension mismatch");
  const std::complex<double> c = reference.dot(t);  // <ref, t>, conjugating ref
  const double magnitude = std::abs(c);
  if (magnitude < 1e-300) return v_hat;  // orthogonal to the reference: keep as is
  return embed(t * (std::conj(c) / magnitude));
}

DensityFeature density_feature(const Eigen::VectorXd& v_hat, int block_index) {
  const auto dim = v_hat.size();
  require(dim >= 2 && dim % 2 == 0, "density_feature needs an even-length vector");
  constexpr double kDenominatorGuard = 1e-12;
  const auto m = dim / 2;
  DensityFeature feature;
  feature.block_index = block_index;
  feature.values.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double denom = v_hat(m + i);
    if (std::abs(denom) < kDenominatorGuard) {
      denom = denom < 0.0 ? -kDenominatorGuard : kDenominatorGuard;
    }
    feature.values(i) = v_hat(i) / denom;
  }
  const double norm = feature.values.norm();
  if (norm > 0.0) feature.values /= norm;
  return feature;
}

DensityFeature phase_feature(const Eigen::VectorXd& v_hat, int block_index) {
  const auto dim = v_hat.size();
  require(dim >= 4 && dim % 2 == 0, "phase_feature needs at least two antennas");
  constexpr double kMagnitudeGuard = 1e-24;  // squared-magnitude guard
  const auto m = dim / 2;
  DensityFeature feature;
  feature.block_index = block_index;
  feature.values.resize(2 * (m - 1));
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const std::complex<double> a(v_hat(i), v_hat(m + i));
    const std::complex<double> b(v_hat(i + 1), v_hat(m + i + 1));
    const std::complex<double> increment = b * std::conj(a);
    const double magnitude = std::abs(increment);
    if (magnitude < kMagnitudeGuard) {
      feature.values(i) = 1.0;
      feature.values(m - 1 + i) = 0.0;
    } else {
      feature.values(i) = increment.real() / magnitude;
      feature.values(m - 1 + i) = increment.imag() / magnitude;
    }
  }
  feature.values /= std::sqrt(static_cast<double>(m - 1));
  return feature;
}

}  // namespace opdad
