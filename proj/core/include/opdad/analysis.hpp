// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_ANALYSIS_HPP
#define OPDAD_ANALYSIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "opdad/common.hpp"

namespace opdad {

/// Sorted spectrum lambda_1 >= ... >= lambda_{2M} >= 0 of the real-embedded
/// covariance, with a strictly positive eigengap (standing assumption of the
/// convergence results).
struct SpectrumParams {
  Eigen::VectorXd eigenvalues;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  int antennas() const { return dimension() / 2; }  // the M of the bounds
  double eigengap() const { return eigenvalues(0) - eigenvalues(1); }
  void validate() const;
};

struct BoundInputs {
  double beta = 0.0;    // stepsize
  double xi = 0.0;      // tuning parameter, > 0
  double c = 0.0;       // warm-start constant, (0, 1)
  double delta = 0.0;   // control factor, (0, 1/2)
  long sample_size = 0; // L

  void validate() const;
};

struct RescaledIndices {
  long l_star = 0;  // L*_{beta, xi}
  long l_zero = 0;  // L0_{beta, c}
};

/// L* = ceil( xi * log(lambda1^->{-2} gap / beta) / (-log(1 - beta*gap)) ),
/// L0 = ceil( log(c*M)                           / (-log(1 - beta*gap)) ),
/// both at least 1. Errors on beta*gap >= 1 and on a log argument <= 1.
RescaledIndices rescaled_indices(const SpectrumParams& spectrum, const BoundInputs& in);

/// Rescaled stepsize lambda1^2 * gap^{-1} * beta.
double rescaled_stepsize(const SpectrumParams& spectrum, double beta);

struct TheoremBound {
  double bound = 0.0;
  double probability_floor = 0.0;
  double psi = 0.0;             // additive residual
  double rho = 0.0;             // geometric contraction factor
  double hypothesis_value = 0.0;
  bool hypothesis_ok = true;
  bool vacuous_floor = false;   // probability floor <= 0 (reported raw)
  double prefactor = 0.0;       // delta^4 M^2 for the randomized-init bound
};

/// Deterministic-initialization bound rho^{2(l - L0)} + psi with probability
/// floor 1 - M L0 Gamma - 2 M L* Gamma. The scaling quantity M beta^{1-2xi}
/// is reported and flagged (not fatal) when above 0.1.
TheoremBound theorem1_bound(const SpectrumParams& spectrum, const BoundInputs& in, long l);

/// Uniform-random-initialization bound delta^4 M^2 rho^{2l} + psi with floor
/// 1 - 2 delta, under M (rescaled stepsize)^{1-2xi} <= delta^2. Hypothesis
/// violation is a hard error unless force is set.
TheoremBound theorem2_bound(const SpectrumParams& spectrum, const BoundInputs& in, long l,
                            bool force = false);

/// Stepsize log(L) / (gap * L) used by the finite-sample bound.
double theorem3_stepsize(const SpectrumParams& spectrum, long sample_size);

/// Finite-sample residual psi' = (lambda1/gap) * sum_m lambda_m/(lambda1 -
/// lambda_m) * log(L)/L, under M [lambda1^2 gap^{-2} log(L)/L]^{1-2xi} <=
/// delta^2. Needs L >= 3.
double theorem3_bound(const SpectrumParams& spectrum, long sample_size, double delta,
                      double xi, bool force = false);

/// Left side of the finite-sample event inequality
/// M * L* * exp(-(rescaled stepsize)^{-2xi}) at the theorem-3 stepsize;
/// reported by verify-bounds, not gated.
double theorem3_event_value(const SpectrumParams& spectrum, long sample_size,
                            double xi);

struct MultiplierSplit {
  double total = 0.0;
  double d1 = 0.0;  // transient part, carries the rho^{2l} factor
  double d2 = 0.0;  // stationary part, carries the delta factor
};

/// Finite-sample multiplier D(2M, L, delta) = D1 + D2 evaluated at iteration
/// l with the theorem-3 stepsize.
MultiplierSplit appendix_multiplier(const SpectrumParams& spectrum, long sample_size,
                                    double delta, double xi, long l, bool force = false);

/// Least-squares slope of D against log(L) over the given sample sizes;
/// near zero when the multiplier has flattened to its constant.
double multiplier_logl_slope(const SpectrumParams& spectrum,
                             const std::vector<long>& sample_sizes, double delta,
                             double xi, bool force = false);

/// tan^2 of the angle between two directions (sign-invariant); +inf when
/// they are orthogonal.
double tan_angle_sq(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v_star);

/// Tangent of the angle between a rescaled-space iterate and the first
/// canonical axis: sqrt(sum_{m>=2} u_m^2) / |u_1|.
double tangent_to_first_axis(const Eigen::VectorXd& u);

}  // namespace opdad

#endif  // OPDAD_ANALYSIS_HPP
