// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>

#include "opdad/channel.hpp"
#include "opdad/oracle.hpp"

using namespace opdad;

namespace {

// Independent quadrature oracle: adaptive Simpson on the real and imaginary
// parts separately, refined to 1e-12.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

std::complex<double> one_ring_entry_oracle(double mean, double spread, int d) {
  auto re = [&](double theta) { return std::cos(-d * kPi * std::sin(theta)); };
  auto im = [&](double theta) { return std::sin(-d * kPi * std::sin(theta)); };
  const double a = mean - spread, b = mean + spread;
  return {integrate(re, a, b, 1e-13) / (2.0 * spread),
          integrate(im, a, b, 1e-13) / (2.0 * spread)};
}

// Bessel J0 power series, summed until the term drops below 1e-18.
double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

Eigen::VectorXcd steering_vector(double aoa, int antennas) {
  Eigen::VectorXcd a(antennas);
  for (int p = 0; p < antennas; ++p) a(p) = std::polar(1.0, -p * kPi * std::sin(aoa));
  return a;
}

}  // namespace

TEST_CASE("one-ring covariance has exact unit diagonal and trace M") {
  ChannelGeometry geom{0.3, deg_to_rad(5.0), 100.0, EmitterKind::legitimate};
  const CovarianceMatrix cov = one_ring_covariance(geom, 8);
  for (int p = 0; p < 8; ++p) {
    CHECK(cov.entries()(p, p).real() == 1.0);
    CHECK(cov.entries()(p, p).imag() == 0.0);
  }
  CHECK(std::abs(cov.entries().trace().real() - 8.0) < 1e-14);
}

TEST_CASE("full-circle entry reproduces the Bessel identity J0(pi)") {
  // Spread pi makes the off-diagonal integral a full-circle Bessel integral.
  ChannelGeometry geom{0.0, kPi, 100.0, EmitterKind::legitimate};
  const CovarianceMatrix cov = one_ring_covariance(geom, 4);
  const std::complex<double> entry = cov.entries()(1, 0);
  const double j0 = bessel_j0(kPi);
  CHECK(std::abs(entry.real() - j0) < 1e-9);
  CHECK(std::abs(entry.imag()) < 1e-9);
  CHECK(entry.real() == doctest::Approx(-0.30424).epsilon(1e-3));
  const std::complex<double> oracle = one_ring_entry_oracle(0.0, kPi, -1);
  CHECK(std::abs(entry - oracle) < 1e-9);
}

TEST_CASE("narrow spread collapses to the steering vector") {
  ChannelGeometry geom{kPi / 6.0, 1e-6, 100.0, EmitterKind::legitimate};
  const int m = 6;
  const CovarianceMatrix cov = one_ring_covariance(geom, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const std::complex<double> expected =
          std::polar(1.0, -(p - q) * kPi * std::sin(kPi / 6.0));
      CHECK(std::abs(cov.entries()(p, q) - expected) < 1e-6);
    }
  }
  // Spectrum concentrates on one direction.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov.entries());
  CHECK(solver.eigenvalues().maxCoeff() / m > 0.999);
}

TEST_CASE("entries match an independent adaptive quadrature oracle") {
  ChannelGeometry geom{-0.4, deg_to_rad(9.0), 100.0, EmitterKind::legitimate};
  const int m = 8;
  const CovarianceMatrix cov = one_ring_covariance(geom, m);
  for (int d = 1; d < m; ++d) {
    const std::complex<double> oracle =
        one_ring_entry_oracle(geom.mean_aoa, geom.angular_spread, d);
    CHECK(std::abs(cov.entries()(d, 0) - oracle) < 1e-9);
  }
}

TEST_CASE("covariances are Hermitian and positive semidefinite") {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ChannelGeometry geom;
    geom.mean_aoa = rng.uniform(-kPi / 2.0, kPi / 2.0);
    geom.angular_spread = rng.uniform(deg_to_rad(0.5), deg_to_rad(40.0));
    geom.distance_m = rng.uniform(30.0, 400.0);
    const int m = 4 + static_cast<int>(rng.below(29));
    const CovarianceMatrix cov = one_ring_covariance(geom, m);
    CHECK(cov.hermitian_residual() <= 1e-12);
    CHECK(cov.min_eigenvalue() >= -1e-10 * m);
    CHECK(std::abs(cov.entries().trace().real() - m) < 1e-12 * m);
  }
}

TEST_CASE("narrow spread concentrates the principal eigenvalue") {
  const int m = 32;
  ChannelGeometry narrow{0.2, deg_to_rad(2.0), 100.0, EmitterKind::legitimate};
  ChannelGeometry wide{0.2, deg_to_rad(30.0), 100.0, EmitterKind::legitimate};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sn(
      one_ring_covariance(narrow, m).entries());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sw(
      one_ring_covariance(wide, m).entries());
  CHECK(sn.eigenvalues().maxCoeff() / m > sw.eigenvalues().maxCoeff() / m);
}

TEST_CASE("invalid geometry and antenna counts are rejected") {
  ChannelGeometry geom{0.0, deg_to_rad(5.0), 100.0, EmitterKind::legitimate};
  CHECK_THROWS_AS((void)one_ring_covariance(geom, 0), ValidationError);
  geom.angular_spread = 0.0;
  CHECK_THROWS_AS((void)one_ring_covariance(geom, 4), ValidationError);
  geom.angular_spread = -0.1;
  CHECK_THROWS_AS((void)one_ring_covariance(geom, 4), ValidationError);
  geom.angular_spread = 4.0;  // > pi
  CHECK_THROWS_AS((void)one_ring_covariance(geom, 4), ValidationError);
}

TEST_CASE("path loss gain") {
  CHECK(path_loss_gain(1.0, 3.7) == 1.0);
  CHECK(path_loss_gain(10.0, 3.7) == doctest::Approx(1.9952623149688788e-4).epsilon(1e-12));
  CHECK(path_loss_gain(100.0, 2.0) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK_THROWS_AS((void)path_loss_gain(0.0, 2.0), ValidationError);
  CHECK_THROWS_AS((void)path_loss_gain(-1.0, 2.0), ValidationError);
  CHECK_THROWS_AS((void)path_loss_gain(1.0, 0.0), ValidationError);
}

TEST_CASE("identity covariance sampling has unit per-entry variance") {
  const int m = 4;
  CovarianceMatrix cov(Eigen::MatrixXcd::Identity(m, m), m);
  ChannelSampler sampler(cov);
  RngStream rng(11);
  const int draws = 100000;
  Eigen::VectorXd power = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXcd h = sampler.sample(rng);
    for (int a = 0; a < m; ++a) power(a) += std::norm(h(a));
  }
  power /= draws;
  for (int a = 0; a < m; ++a) CHECK(power(a) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rank-one covariance gives collinear realizations") {
  ChannelGeometry geom{kPi / 6.0, 1e-8, 100.0, EmitterKind::legitimate};
  const int m = 8;
  const CovarianceMatrix cov = one_ring_covariance(geom, m);
  ChannelSampler sampler(cov);
  const Eigen::VectorXcd a = steering_vector(geom.mean_aoa, m);
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXcd h = sampler.sample(rng);
    const Eigen::VectorXcd residual = h - a * (a.dot(h) / static_cast<double>(m));
    CHECK(residual.norm() / h.norm() < 1e-6);
  }
}

TEST_CASE("fixed seed reproduces the realization") {
  ChannelGeometry geom{0.1, deg_to_rad(5.0), 50.0, EmitterKind::jammer};
  const CovarianceMatrix cov = one_ring_covariance(geom, 6);
  RngStream a(42), b(42);
  const ChannelRealization ra = sample_channel(cov, a);
  const ChannelRealization rb = sample_channel(cov, b);
  for (int i = 0; i < 6; ++i) CHECK(ra.vector(i) == rb.vector(i));
}

TEST_CASE("sample covariance converges at the Monte Carlo rate") {
  ChannelGeometry geom{-0.2, deg_to_rad(5.0), 100.0, EmitterKind::legitimate};
  const int m = 4;
  const CovarianceMatrix cov = one_ring_covariance(geom, m);
  ChannelSampler sampler(cov);
  RngStream rng(19);
  const int draws = 100000;
  Eigen::MatrixXcd sample_cov = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd h;
  for (int i = 0; i < draws; ++i) {
    sampler.sample_into(h, rng);
    sample_cov.selfadjointView<Eigen::Lower>().rankUpdate(h, 1.0);
  }
  sample_cov = sample_cov.selfadjointView<Eigen::Lower>();
  sample_cov /= static_cast<double>(draws);
  const double frobenius = (sample_cov - cov.entries()).norm();
  CHECK(frobenius < 5.0 * m / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("indefinite matrices are rejected by the factorization") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(3, 3);
  bad(2, 2) = -0.5;
  CovarianceMatrix cov(bad, 3);
  CHECK_THROWS_AS(ChannelSampler{cov}, NumericalError);
}
