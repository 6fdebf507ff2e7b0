// SPDX-License-Identifier: Apache-2.0
//
// Exact distribution of the largest eigenvalue of a correlated central
// complex Wishart matrix, evaluated in log domain for numerical range.
//
// For A = (1/n) X X^H with X an m-by-n matrix of zero-mean circular complex
// Gaussians with column covariance Sigma (distinct eigenvalues), the CDF of
// the largest eigenvalue alpha_max of n*A is
//
//   Pr(alpha_max <= eta) = norm * det[ Lambda(eta) ],
//   Lambda(eta)_ij = gamma(n - i + 1, eta * lambda_j) / lambda_j^(n - i + 1),
//
// where lambda_1 < ... < lambda_m are the eigenvalues of Sigma^{-1},
// gamma(a, x) is the lower incomplete gamma function, and norm collects the
// Gamma-function and Vandermonde factors.  With ascending lambdas the
// Vandermonde product is positive and the eta -> infinity limit is exactly 1.

#pragma once

#include <vector>

#include "sense/model.hpp"

namespace sense {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a) for
/// integer a >= 1, x >= 0.  Series expansion for x < a + 1, Lentz continued
/// fraction for the complementary function otherwise.
double regularized_gamma_p(int a, double x);

/// log P(a, x); returns -infinity at x = 0.  Needed where P underflows
/// (large a with small x), e.g. the determinant entries far in the CDF tail.
double log_regularized_gamma_p(int a, double x);

/// Unnormalized lower incomplete gamma gamma(a, x) = P(a, x) * (a-1)!.
double lower_incomplete_gamma(int a, double x);

/// Eigen-structure of the Wishart evaluation: ascending eigenvalues of
/// Sigma^{-1}, the observation count n, and the log of the normalization
/// constant (Gamma factors and Vandermonde determinant combined).
///
/// Coincident eigenvalues make the determinant formula 0/0; clusters closer
/// than 1e-9 * lambda_max are symmetrically spread with step 2e-8 * lambda_max
/// before the normalizer is computed.
class WishartSpectrum {
public:
  /// Spectrum for samples with covariance `sigma` (positive definite),
  /// `sample_count` >= dim.  Throws unsupported_configuration when
  /// sample_count < dim, std::invalid_argument when sigma is singular.
  static WishartSpectrum from_covariance(const HermitianMatrix &sigma,
                                         int sample_count);

  /// Direct construction from eigenvalues of Sigma^{-1} (any order, positive).
  static WishartSpectrum from_inverse_eigenvalues(std::vector<double> lambdas,
                                                  int sample_count);

  const std::vector<double> &lambdas() const { return lambdas_; }
  int sample_count() const { return sample_count_; }  // n
  int dim() const { return static_cast<int>(lambdas_.size()); }  // m
  double log_norm() const { return log_norm_; }
  double norm_sign() const { return norm_sign_; }

  /// Debug hook for validation tooling: same spectrum with the sign of the
  /// normalization constant flipped, emulating a wrong Vandermonde ordering
  /// convention.  CDF values computed from it violate normalization.
  WishartSpectrum debug_negated_norm() const;

private:
  WishartSpectrum() = default;
  std::vector<double> lambdas_;
  int sample_count_ = 0;
  double log_norm_ = 0.0;
  double norm_sign_ = 1.0;
};

/// Convenience spelling of WishartSpectrum::from_covariance.
WishartSpectrum spectrum_of(const HermitianMatrix &sigma, int sample_count);

/// CDF of the largest eigenvalue of n*A at `eta` (un-normalized scale).
/// Returns 0 for eta <= 0, and exactly 1 once every column of the kernel
/// matrix is saturated beyond double precision (complement below ~1e-52).
/// Values outside [0, 1] by more than 1e-8 raise numerical_failure; smaller
/// excursions are clamped.
double max_eig_cdf(double eta, const WishartSpectrum &spectrum);

/// CDF of the test statistic alpha_max((1/K) sum y y^H) at threshold `eta`
/// for samples y ~ CN(0, sigma): max_eig_cdf(K * eta, spectrum_of(sigma, K)).
double ts_cdf(double eta, const HermitianMatrix &sigma, int sample_count);

/// Same with a precomputed spectrum (avoids re-solving the eigenproblem).
double ts_cdf(double eta, const WishartSpectrum &spectrum);

}  // namespace sense
