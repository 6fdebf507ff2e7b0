// SPDX-License-Identifier: Apache-2.0
//
// Maximum-eigenvalue detection: the test statistic, closed-form false-alarm
// and detection probabilities, Neyman-Pearson threshold inversion, and ROC
// aggregation.

#pragma once

#include <vector>

#include "sense/wishart.hpp"

namespace sense {

/// Immutable detection problem: null covariance Sigma0 (noise only), signal
/// covariance Sigma1 = R_s + Sigma0, and the observation count K.  Both
/// Wishart spectra are solved once at construction and cached; evaluation is
/// then safe for concurrent grid sweeps.
class DetectorConfig {
public:
  /// Requires matching dimensions, K >= dim, and Sigma1 - Sigma0 PSD
  /// (the signal adds nonnegative energy); throws std::invalid_argument.
  DetectorConfig(const HermitianMatrix &sigma0, const HermitianMatrix &sigma1,
                 int samples);

  const HermitianMatrix &sigma0() const { return sigma0_; }
  const HermitianMatrix &sigma1() const { return sigma1_; }
  int samples() const { return samples_; }
  const WishartSpectrum &null_spectrum() const { return null_spectrum_; }
  const WishartSpectrum &signal_spectrum() const { return signal_spectrum_; }

private:
  HermitianMatrix sigma0_;
  HermitianMatrix sigma1_;
  int samples_;
  WishartSpectrum null_spectrum_;
  WishartSpectrum signal_spectrum_;
};

/// One operating point of a detection curve.
struct RocPoint {
  double threshold = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

/// Ordered detection curve: thresholds strictly increasing, p_fa and p_d
/// nonincreasing along the list (validated at construction).
class DetectionCurve {
public:
  static DetectionCurve from(std::vector<RocPoint> points);
  const std::vector<RocPoint> &points() const { return points_; }

private:
  std::vector<RocPoint> points_;
};

/// Largest eigenvalue of the sample covariance (1/K) sum_k y_k y_k^H.
double test_statistic(const std::vector<Eigen::VectorXcd> &samples);

/// False-alarm probability Pr(TS > eta | H0) = 1 - ts_cdf(eta, Sigma0, K).
double p_fa(double eta, const DetectorConfig &cfg);

/// Detection probability Pr(TS > eta | H1) = 1 - ts_cdf(eta, Sigma1, K).
double p_d(double eta, const DetectorConfig &cfg);

/// Threshold eta with |p_fa(eta) - target| <= 1e-9, found by geometric
/// bracket growth from [0, trace(Sigma0)] followed by bisection on the
/// monotone p_fa.  Throws numerical_failure if no bracket is found within
/// 200 doublings.
double threshold_for_pfa(double target, const DetectorConfig &cfg);

/// Detection curve over a strictly increasing grid of target false-alarm
/// probabilities in (0, 1).
DetectionCurve roc(const DetectorConfig &cfg,
                   const std::vector<double> &pfa_targets);

}  // namespace sense
