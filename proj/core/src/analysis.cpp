// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/analysis.hpp"

#include <cmath>
#include <limits>

namespace opdad {
namespace {

// Neumaier-compensated accumulation; the psi sums lose digits under naive
// summation when eigenvalues cluster near lambda_1.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// psi = beta * sum_{m=2}^{2M} (l1 lm + l1^2 * beta_hat^{0.5-4xi}) / (l1 - lm).
double psi_residual(const SpectrumParams& spectrum, double beta, double xi) {
  const Eigen::VectorXd& lambda = spectrum.eigenvalues;
  const double l1 = lambda(0);
  const double beta_hat = rescaled_stepsize(spectrum, beta);
  const double noise_term = l1 * l1 * std::pow(beta_hat, 0.5 - 4.0 * xi);
  CompensatedSum sum;
  for (int m = 1; m < spectrum.dimension(); ++m) {
    const double gap_m = l1 - lambda(m);
    if (gap_m <= 0.0) {
      throw NumericalError("degenerate spectrum: lambda_1 equals a trailing eigenvalue");
    }
    sum.add((l1 * lambda(m) + noise_term) / gap_m);
  }
  return beta * sum.value();
}

double contraction_factor(const SpectrumParams& spectrum, double beta) {
  const double rho = 1.0 - beta * spectrum.eigengap();
  if (rho <= 0.0 || rho >= 1.0) {
    throw NumericalError("stepsize out of the contractive range: beta * gap not in (0, 1)");
  }
  return rho;
}

}  // namespace

void SpectrumParams::validate() const {
  require(eigenvalues.size() >= 2, "spectrum needs at least two eigenvalues");
  require(eigenvalues.size() % 2 == 0, "embedded spectrum must have even dimension");
  for (Eigen::Index i = 0; i + 1 < eigenvalues.size(); ++i) {
    require(eigenvalues(i) >= eigenvalues(i + 1), "eigenvalues must be sorted descending");
  }
  require(eigenvalues(eigenvalues.size() - 1) >= 0.0, "eigenvalues must be non-negative");
  if (eigengap() <= 0.0) {
    throw NumericalError("spectrum eigengap must be strictly positive");
  }
}

void BoundInputs::validate() const {
  require(beta > 0.0, "stepsize must be positive");
  require(xi > 0.0, "tuning parameter xi must be positive");
  require(c > 0.0 && c < 1.0, "warm constant c must lie in (0, 1)");
  require(delta > 0.0 && delta < 0.5, "control factor delta must lie in (0, 1/2)");
}

double rescaled_stepsize(const SpectrumParams& spectrum, double beta) {
  const double l1 = spectrum.eigenvalues(0);
  return l1 * l1 / spectrum.eigengap() * beta;
}

RescaledIndices rescaled_indices(const SpectrumParams& spectrum, const BoundInputs& in) {
  spectrum.validate();
  in.validate();
  const double gap = spectrum.eigengap();
  if (in.beta * gap >= 1.0) {
    throw NumericalError("divergent stepsize: beta * eigengap >= 1");
  }
  const double denom = -std::log1p(-in.beta * gap);
  const double l1 = spectrum.eigenvalues(0);
  const double star_argument = gap / (l1 * l1 * in.beta);
  if (star_argument <= 0.0) {
    throw NumericalError("rescaled index: non-positive logarithm argument");
  }
  if (star_argument <= 1.0) {
    throw NumericalError("rescaled index: logarithm argument must exceed 1");
  }
  RescaledIndices out;
  out.l_star = static_cast<long>(std::ceil(in.xi * std::log(star_argument) / denom));
  const double zero_argument = in.c * spectrum.antennas();
  const double zero_raw =
      zero_argument > 1.0 ? std::ceil(std::log(zero_argument) / denom) : 1.0;
  out.l_zero = static_cast<long>(zero_raw);
  out.l_star = std::max(out.l_star, 1L);
  out.l_zero = std::max(out.l_zero, 1L);
  return out;
}

TheoremBound theorem1_bound(const SpectrumParams& spectrum, const BoundInputs& in, long l) {
  spectrum.validate();
  in.validate();
  const RescaledIndices indices = rescaled_indices(spectrum, in);
  require(l >= indices.l_zero, "iteration must be at least the initial index L0");

  TheoremBound out;
  out.rho = contraction_factor(spectrum, in.beta);
  out.psi = psi_residual(spectrum, in.beta, in.xi);
  out.bound = std::pow(out.rho, 2.0 * static_cast<double>(l - indices.l_zero)) + out.psi;

  const int m = spectrum.antennas();
  out.hypothesis_value = m * std::pow(in.beta, 1.0 - 2.0 * in.xi);
  out.hypothesis_ok = out.hypothesis_value <= 0.1;

  const double beta_hat = rescaled_stepsize(spectrum, in.beta);
  const double gamma = std::exp(-in.c * std::pow(beta_hat, -2.0 * in.xi));
  out.probability_floor = 1.0 - m * static_cast<double>(indices.l_zero) * gamma -
                          2.0 * m * static_cast<double>(indices.l_star) * gamma;
  out.vacuous_floor = out.probability_floor <= 0.0;
  return out;
}

TheoremBound theorem2_bound(const SpectrumParams& spectrum, const BoundInputs& in, long l,
                            bool force) {
  spectrum.validate();
  in.validate();
  require(l >= 0, "iteration must be non-negative");

  TheoremBound out;
  const int m = spectrum.antennas();
  const double beta_hat = rescaled_stepsize(spectrum, in.beta);
  out.hypothesis_value = m * std::pow(beta_hat, 1.0 - 2.0 * in.xi);
  out.hypothesis_ok = out.hypothesis_value <= in.delta * in.delta;
  if (!out.hypothesis_ok && !force) {
    throw NumericalError(
        "theorem-2 hypothesis violated: M * (rescaled stepsize)^(1-2xi) > delta^2");
  }

  out.rho = contraction_factor(spectrum, in.beta);
  out.psi = psi_residual(spectrum, in.beta, in.xi);
  out.prefactor = std::pow(in.delta, 4.0) * static_cast<double>(m) * m;
  out.bound = out.prefactor * std::pow(out.rho, 2.0 * static_cast<double>(l)) + out.psi;
  out.probability_floor = 1.0 - 2.0 * in.delta;
  out.vacuous_floor = out.probability_floor <= 0.0;
  return out;
}

double theorem3_stepsize(const SpectrumParams& spectrum, long sample_size) {
  spectrum.validate();
  require(sample_size >= 3, "finite-sample analysis needs L >= 3");
  return std::log(static_cast<double>(sample_size)) /
         (spectrum.eigengap() * static_cast<double>(sample_size));
}

namespace {

double theorem3_hypothesis_value(const SpectrumParams& spectrum, long sample_size,
                                 double xi) {
  const double l1 = spectrum.eigenvalues(0);
  const double gap = spectrum.eigengap();
  const double log_ratio =
      std::log(static_cast<double>(sample_size)) / static_cast<double>(sample_size);
  const double base = l1 * l1 / (gap * gap) * log_ratio;
  return spectrum.antennas() * std::pow(base, 1.0 - 2.0 * xi);
}

}  // namespace

double theorem3_bound(const SpectrumParams& spectrum, long sample_size, double delta,
                      double xi, bool force) {
  spectrum.validate();
  require(sample_size >= 3, "finite-sample analysis needs L >= 3");
  require(delta > 0.0 && delta < 0.5, "control factor delta must lie in (0, 1/2)");
  require(xi > 0.0, "tuning parameter xi must be positive");

  const double hypothesis = theorem3_hypothesis_value(spectrum, sample_size, xi);
  if (hypothesis > delta * delta && !force) {
    throw NumericalError(
        "theorem-3 hypothesis violated: M * (lambda1^2 gap^-2 logL/L)^(1-2xi) > delta^2");
  }

  const Eigen::VectorXd& lambda = spectrum.eigenvalues;
  const double l1 = lambda(0);
  const double log_ratio =
      std::log(static_cast<double>(sample_size)) / static_cast<double>(sample_size);
  CompensatedSum sum;
  for (int m = 1; m < spectrum.dimension(); ++m) {
    const double gap_m = l1 - lambda(m);
    if (gap_m <= 0.0) {
      throw NumericalError("degenerate spectrum: lambda_1 equals a trailing eigenvalue");
    }
    sum.add(lambda(m) / gap_m);
  }
  return l1 / spectrum.eigengap() * sum.value() * log_ratio;
}

double theorem3_event_value(const SpectrumParams& spectrum, long sample_size, double xi) {
  const double beta = theorem3_stepsize(spectrum, sample_size);
  BoundInputs in;
  in.beta = beta;
  in.xi = xi;
  in.c = 0.5;
  in.delta = 0.25;
  in.sample_size = sample_size;
  const RescaledIndices indices = rescaled_indices(spectrum, in);
  const double beta_hat = rescaled_stepsize(spectrum, beta);
  return spectrum.antennas() * static_cast<double>(indices.l_star) *
         std::exp(-std::pow(beta_hat, -2.0 * xi));
}

MultiplierSplit appendix_multiplier(const SpectrumParams& spectrum, long sample_size,
                                    double delta, double xi, long l, bool force) {
  spectrum.validate();
  require(l >= 0, "iteration must be non-negative");
  // Shares the theorem-3 regime; validates the same hypothesis.
  const double psi_prime = theorem3_bound(spectrum, sample_size, delta, xi, force);

  const Eigen::VectorXd& lambda = spectrum.eigenvalues;
  const double l1 = lambda(0);
  const double gap = spectrum.eigengap();
  const double beta = theorem3_stepsize(spectrum, sample_size);
  const double beta_hat = rescaled_stepsize(spectrum, beta);
  const double log_ratio =
      std::log(static_cast<double>(sample_size)) / static_cast<double>(sample_size);

  const int m_count = spectrum.antennas();
  const double rho = contraction_factor(spectrum, beta);
  const double a_term = delta * delta * m_count *
                        std::pow(rho, 2.0 * static_cast<double>(l));
  const double b_term = l1 * l1 * std::pow(beta_hat, 0.5 - 4.0 * xi);

  CompensatedSum numerator_sum;
  for (int m = 1; m < spectrum.dimension(); ++m) {
    const double gap_m = l1 - lambda(m);
    if (gap_m <= 0.0) {
      throw NumericalError("degenerate spectrum: lambda_1 equals a trailing eigenvalue");
    }
    numerator_sum.add((l1 * lambda(m) + b_term) / (gap_m * gap));
  }

  MultiplierSplit split;
  split.d1 = a_term / psi_prime;
  split.d2 = delta * numerator_sum.value() * log_ratio / psi_prime;
  split.total = split.d1 + split.d2;
  return split;
}

double multiplier_logl_slope(const SpectrumParams& spectrum,
                             const std::vector<long>& sample_sizes, double delta,
                             double xi, bool force) {
  require(sample_sizes.size() >= 2, "slope fit needs at least two sample sizes");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(sample_sizes.size());
  for (long size : sample_sizes) {
    const MultiplierSplit split =
        appendix_multiplier(spectrum, size, delta, xi, size, force);
    const double x = std::log(static_cast<double>(size));
    sx += x;
    sy += split.total;
    sxx += x * x;
    sxy += x * split.total;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double tan_angle_sq(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star) {
  const double nh = v_hat.norm(), ns = v_star.norm();
  require(nh > 0.0 && ns > 0.0, "tan_angle_sq: zero vector");
  const double cos_sq =
      std::min(1.0, std::pow(std::abs(v_hat.dot(v_star)) / (nh * ns), 2.0));
  if (cos_sq == 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - cos_sq) / cos_sq;
}

double tangent_to_first_axis(const Eigen::VectorXd& u) {
  require(u.size() >= 2, "tangent needs a vector of dimension >= 2");
  const double first = std::abs(u(0));
  const double rest = std::sqrt(std::max(0.0, u.squaredNorm() - first * first));
  if (first == 0.0) return std::numeric_limits<double>::infinity();
  return rest / first;
}

}  // namespace opdad
