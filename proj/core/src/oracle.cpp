// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace opdad {
namespace {

constexpr double kDegenerateRelTol = 1e-12;

Eigen::VectorXd clamp_spectrum(Eigen::VectorXd values) {
  const double scale = std::max(std::abs(values.maxCoeff()), 1e-300);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0 && values(i) > -1e-10 * scale) values(i) = 0.0;
  }
  return values;
}

template <typename Matrix>
void window_covariance(const std::vector<Eigen::VectorXcd>& buffer, std::size_t filled,
                       Matrix& cov) {
  const auto m = buffer.front().size();
  cov.setZero(m, m);
  for (std::size_t i = 0; i < filled; ++i) {
    cov.template selfadjointView<Eigen::Lower>().rankUpdate(buffer[i], 1.0);
  }
  cov = cov.template selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(filled);
}

int numerical_rank(const Eigen::VectorXd& eigenvalues, double tau_rank) {
  const double top = eigenvalues.maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > tau_rank * top) ++rank;
  }
  return rank;
}

}  // namespace

PrincipalDirectionTruth dmf_principal(const Eigen::MatrixXd& symmetric) {
  require(symmetric.rows() == symmetric.cols() && symmetric.rows() >= 1,
          "dmf_principal needs a square matrix");
  if (symmetric.cwiseAbs().maxCoeff() == 0.0) {
    throw ValidationError("dmf_principal: all-zero input");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  const auto n = symmetric.rows();
  PrincipalDirectionTruth truth;
  truth.eigenvalues = clamp_spectrum(solver.eigenvalues().reverse());
  truth.vector = solver.eigenvectors().col(n - 1);
  truth.degenerate =
      n > 1 && truth.eigengap() <= kDegenerateRelTol * std::abs(truth.eigenvalues(0));
  return truth;
}

PrincipalDirectionTruth dmf_principal(const std::vector<Eigen::VectorXd>& samples) {
  require(samples.size() >= 2, "dmf_principal needs at least two samples");
  const auto dim = samples.front().size();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Eigen::VectorXd& s : samples) {
    require(s.size() == dim, "sample dimension mismatch");
    cov.selfadjointView<Eigen::Lower>().rankUpdate(s, 1.0);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(samples.size());
  return dmf_principal(cov);
}

ComplexPrincipal complex_principal(const Eigen::MatrixXcd& hermitian) {
  require(hermitian.rows() == hermitian.cols() && hermitian.rows() >= 1,
          "complex_principal needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  const auto n = hermitian.rows();
  ComplexPrincipal out;
  out.eigenvalues = clamp_spectrum(solver.eigenvalues().reverse());
  out.vector = solver.eigenvectors().col(n - 1);
  out.degenerate =
      n > 1 && out.eigengap() <= kDegenerateRelTol * std::abs(out.eigenvalues(0));
  return out;
}

Eigen::MatrixXcd complex_sample_covariance(const std::vector<Observation>& blocks) {
  require(!blocks.empty(), "sample covariance needs observations");
  const auto m = blocks.front().signal.size();
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
  for (const Observation& obs : blocks) {
    cov.selfadjointView<Eigen::Lower>().rankUpdate(obs.signal, 1.0);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(blocks.size());
  return cov;
}

double principal_angle(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star) {
  const double nh = v_hat.norm(), ns = v_star.norm();
  require(nh > 0.0 && ns > 0.0, "angle: zero vector");
  const double cosine = std::min(1.0, std::abs(v_hat.dot(v_star)) / (nh * ns));
  return std::acos(cosine);
}

double direction_gap(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star) {
  const double nh = v_hat.norm(), ns = v_star.norm();
  require(nh > 0.0 && ns > 0.0, "gap: zero vector");
  const double sign = v_hat.dot(v_star) >= 0.0 ? 1.0 : -1.0;
  return (v_hat / nh - sign * v_star / ns).norm();
}

EmbeddedReference::EmbeddedReference(const Eigen::VectorXcd& complex_direction) {
  require(complex_direction.size() >= 1, "empty reference direction");
  Eigen::VectorXcd t = complex_direction;
  const double norm = t.norm();
  require(norm > 0.0, "zero reference direction");
  t /= norm;
  basis_a_ = embed(t);
  Eigen::VectorXcd it = std::complex<double>(0.0, 1.0) * t;
  basis_b_ = embed(it);
  // The two embeddings are orthonormal by construction.
}

Eigen::VectorXd EmbeddedReference::aligned_to(const Eigen::VectorXd& v) const {
  const double a = basis_a_.dot(v);
  const double b = basis_b_.dot(v);
  const double norm = std::hypot(a, b);
  if (norm == 0.0) return basis_a_;
  return (a / norm) * basis_a_ + (b / norm) * basis_b_;
}

double EmbeddedReference::angle_to(const Eigen::VectorXd& v) const {
  const double nv = v.norm();
  require(nv > 0.0, "angle: zero vector");
  const double in_plane = std::hypot(basis_a_.dot(v), basis_b_.dot(v));
  return std::acos(std::min(1.0, in_plane / nv));
}

double EmbeddedReference::gap_to(const Eigen::VectorXd& v) const {
  const double nv = v.norm();
  require(nv > 0.0, "gap: zero vector");
  return (v / nv - aligned_to(v)).norm();
}

double EmbeddedReference::projection_residual(const Eigen::VectorXd& v) const {
  Eigen::VectorXd residual = v - basis_a_.dot(v) * basis_a_ - basis_b_.dot(v) * basis_b_;
  return residual.norm();
}

EnergyDetector::EnergyDetector(int window, double threshold)
    : window_(window), threshold_(threshold) {
  require(window_ >= 2, "energy detector needs a window of at least 2 blocks");
  buffer_.resize(window_);
}

double ed_feature(const std::vector<Observation>& window_blocks, int antenna) {
  require(window_blocks.size() >= 2, "variance estimate needs at least 2 blocks");
  require(antenna >= 0 && antenna < window_blocks.front().signal.size(),
          "antenna index out of range");
  double acc = 0.0;
  for (const Observation& obs : window_blocks) acc += std::norm(obs.signal(antenna));
  return acc / static_cast<double>(window_blocks.size());
}

EnergyDetector EnergyDetector::calibrate(const std::vector<Observation>& training,
                                         double target_pfa, int window) {
  require(static_cast<int>(training.size()) >= window,
          "ED calibration window is larger than the training stream");
  require(target_pfa > 0.0 && target_pfa < 1.0, "target_pfa must lie in (0, 1)");
  EnergyDetector detector(window, std::numeric_limits<double>::infinity());
  // Non-overlapping windows give independent statistics, so the order
  // statistic controls the exceedance rate.
  std::vector<double> statistics;
  int since_emit = 0;
  for (const Observation& obs : training) {
    detector.step(obs);
    ++since_emit;
    if (detector.filled_ == static_cast<std::size_t>(window) && since_emit >= window) {
      statistics.push_back(detector.last_statistic());
      since_emit = 0;
    }
  }
  require(!statistics.empty(), "ED calibration produced no training statistics");
  std::sort(statistics.begin(), statistics.end());
  // P(new > k-th of n) = (n - k + 1)/(n + 1); match it to target_pfa.
  const auto n = statistics.size();
  auto k = static_cast<std::size_t>(std::llround((1.0 - target_pfa) * (n + 1)));
  k = std::min(std::max<std::size_t>(k, 1), n);
  detector.threshold_ = statistics[k - 1];
  detector.reset();
  return detector;
}

bool EnergyDetector::step(const Observation& obs) {
  buffer_[next_] = obs.signal;
  next_ = (next_ + 1) % buffer_.size();
  filled_ = std::min(filled_ + 1, buffer_.size());
  if (filled_ < buffer_.size()) return false;
  const auto m = obs.signal.size();
  double total = 0.0;
  for (const Eigen::VectorXcd& y : buffer_) total += y.squaredNorm();
  last_statistic_ = total / (static_cast<double>(filled_) * static_cast<double>(m));
  return last_statistic_ > threshold_;
}

void EnergyDetector::reset() {
  next_ = 0;
  filled_ = 0;
  last_statistic_ = 0.0;
}

SubspaceDetector::SubspaceDetector(int window, int baseline_rank, double tau_rank)
    : window_(window), baseline_rank_(baseline_rank), tau_rank_(tau_rank) {
  require(window_ >= 2, "subspace detector needs a window of at least 2 blocks");
  require(baseline_rank_ >= 0, "baseline rank must be non-negative");
  buffer_.resize(window_);
}

int sd_feature(const std::vector<Observation>& window_blocks, double tau_rank) {
  require(window_blocks.size() >= 2, "rank estimate needs at least 2 blocks");
  std::vector<Eigen::VectorXcd> buffer;
  buffer.reserve(window_blocks.size());
  for (const Observation& obs : window_blocks) buffer.push_back(obs.signal);
  Eigen::MatrixXcd cov;
  window_covariance(buffer, buffer.size(), cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov, Eigen::EigenvaluesOnly);
  return numerical_rank(solver.eigenvalues(), tau_rank);
}

SubspaceDetector SubspaceDetector::calibrate(const std::vector<Observation>& training,
                                             int window, double tau_rank) {
  require(static_cast<int>(training.size()) >= window,
          "SD calibration window is larger than the training stream");
  SubspaceDetector detector(window, 0, tau_rank);
  int baseline = 0;
  for (const Observation& obs : training) {
    detector.step(obs);
    if (detector.filled_ == static_cast<std::size_t>(window)) {
      baseline = std::max(baseline, detector.last_rank_);
    }
  }
  detector.baseline_rank_ = baseline;
  detector.reset();
  return detector;
}

bool SubspaceDetector::step(const Observation& obs) {
  buffer_[next_] = obs.signal;
  next_ = (next_ + 1) % buffer_.size();
  filled_ = std::min(filled_ + 1, buffer_.size());
  if (filled_ < buffer_.size()) return false;
  Eigen::MatrixXcd cov;
  window_covariance(buffer_, filled_, cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov, Eigen::EigenvaluesOnly);
  last_rank_ = numerical_rank(solver.eigenvalues(), tau_rank_);
  return last_rank_ > baseline_rank_;
}

void SubspaceDetector::reset() {
  next_ = 0;
  filled_ = 0;
  last_rank_ = 0;
}

}  // namespace opdad
