// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/channel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace opdad {
namespace {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n. Cached per order.
QuadratureRule gauss_legendre(int order) {
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

const QuadratureRule& cached_rule(int order) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

// First row of the Toeplitz one-ring covariance: r[d], d = 0..M-1, at the
// given quadrature order. r[d] = (1/2s) * sum_i w_i * exp(-j*d*pi*sin(t_i)).
std::vector<std::complex<double>> one_ring_row(double mean, double spread, int antennas,
                                               int order) {
  const QuadratureRule& rule = cached_rule(order);
  std::vector<std::complex<double>> row(antennas, {0.0, 0.0});
  for (int i = 0; i < order; ++i) {
    const double theta = mean + spread * rule.nodes[i];
    const double scale = rule.weights[i] / 2.0;  // (1/2s) * (s * w_i)
    const std::complex<double> step = std::polar(1.0, -kPi * std::sin(theta));
    std::complex<double> phase{1.0, 0.0};
    for (int d = 0; d < antennas; ++d) {
      row[d] += scale * phase;
      phase *= step;
    }
  }
  return row;
}

}  // namespace

void ChannelGeometry::validate() const {
  require(angular_spread > 0.0 && angular_spread <= kPi,
          "angular_spread must lie in (0, pi]");
  require(mean_aoa >= -kPi / 2.0 && mean_aoa <= kPi / 2.0,
          "mean_aoa must lie in [-pi/2, pi/2]");
  require(distance_m > 0.0, "distance must be positive");
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXcd entries, int antenna_count)
    : entries_(std::move(entries)), antennas_(antenna_count) {
  require(antennas_ >= 1, "antenna count must be positive");
  require(entries_.rows() == antennas_ && entries_.cols() == antennas_,
          "covariance dimensions must match antenna count");
}

double CovarianceMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_,
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double CovarianceMatrix::hermitian_residual() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

CovarianceMatrix one_ring_covariance(const ChannelGeometry& geom, int antennas) {
  require(antennas >= 1, "antenna count must be positive");
  geom.validate();

  constexpr double kEntryTol = 1e-10;
  constexpr int kStartOrder = 64;
  constexpr int kMaxOrder = 4096;

  std::vector<std::complex<double>> row =
      one_ring_row(geom.mean_aoa, geom.angular_spread, antennas, kStartOrder);
  for (int order = 2 * kStartOrder; order <= kMaxOrder; order *= 2) {
    std::vector<std::complex<double>> refined =
        one_ring_row(geom.mean_aoa, geom.angular_spread, antennas, order);
    double delta = 0.0;
    for (int d = 0; d < antennas; ++d) {
      delta = std::max(delta, std::abs(refined[d] - row[d]));
    }
    row = std::move(refined);
    if (delta <= kEntryTol) break;
  }

  Eigen::MatrixXcd mat(antennas, antennas);
  for (int p = 0; p < antennas; ++p) {
    mat(p, p) = 1.0;  // integrand is identically 1 on the diagonal
    for (int q = 0; q < p; ++q) {
      mat(p, q) = row[p - q];
      mat(q, p) = std::conj(row[p - q]);
    }
  }
  return CovarianceMatrix(std::move(mat), antennas);
}

double path_loss_gain(double distance_m, double exponent) {
  require(distance_m > 0.0, "distance must be positive");
  require(exponent > 0.0, "path loss exponent must be positive");
  return std::pow(distance_m, -exponent);
}

ChannelSampler::ChannelSampler(const CovarianceMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov.entries());
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double trace = values.sum();
  const double negative_tol = 1e-10 * std::max(trace, 1.0);
  if (values.minCoeff() < -negative_tol) {
    throw NumericalError("covariance factorization failed: matrix is indefinite");
  }
  const double keep_tol = 1e-14 * std::max(trace, 1e-300);
  int rank = 0;
  for (int i = 0; i < values.size(); ++i) {
    if (values(i) > keep_tol) ++rank;
  }
  if (rank == 0) {
    throw NumericalError("covariance factorization failed: matrix is numerically zero");
  }
  factor_.resize(cov.entries().rows(), rank);
  int col = 0;
  for (int i = static_cast<int>(values.size()) - 1; i >= 0; --i) {  // descending
    if (values(i) > keep_tol) {
      factor_.col(col++) = solver.eigenvectors().col(i) * std::sqrt(values(i));
    }
  }
}

void ChannelSampler::sample_into(Eigen::VectorXcd& out, RngStream& rng) const {
  const int r = rank();
  Eigen::VectorXcd z(r);
  for (int i = 0; i < r; ++i) z(i) = rng.cgaussian();
  out.noalias() = factor_ * z;
}

Eigen::VectorXcd ChannelSampler::sample(RngStream& rng) const {
  Eigen::VectorXcd out;
  sample_into(out, rng);
  return out;
}

ChannelRealization sample_channel(const CovarianceMatrix& cov, RngStream& rng,
                                  int block_index) {
  ChannelSampler sampler(cov);
  return ChannelRealization{sampler.sample(rng), block_index};
}

}  // namespace opdad
