// SPDX-License-Identifier: Apache-2.0

#include "sense/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sense {

DetectorConfig::DetectorConfig(const HermitianMatrix &sigma0,
                               const HermitianMatrix &sigma1, int samples)
    : sigma0_(sigma0),
      sigma1_(sigma1),
      samples_(samples),
      null_spectrum_(spectrum_of(sigma0, samples)),
      signal_spectrum_(spectrum_of(sigma1, samples)) {
  if (sigma0.dim() != sigma1.dim()) {
    std::ostringstream err;
    err << "DetectorConfig: Sigma0 is " << sigma0.dim() << "x" << sigma0.dim()
        << " but Sigma1 is " << sigma1.dim() << "x" << sigma1.dim();
    throw std::invalid_argument(err.str());
  }
  // Sigma1 must dominate Sigma0 in the Loewner order: the signal only adds
  // energy.  Tolerate eigenvalues at numerical zero.
  const Eigen::MatrixXcd diff = sigma1.matrix() - sigma0.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff,
                                                     Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max({hi, std::abs(lo), 1e-300})) {
    std::ostringstream err;
    err << "DetectorConfig: Sigma1 - Sigma0 is not PSD (min eigenvalue " << lo
        << ")";
    throw std::invalid_argument(err.str());
  }
}

DetectionCurve DetectionCurve::from(std::vector<RocPoint> points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const RocPoint &prev = points[i - 1];
    const RocPoint &cur = points[i];
    if (!(cur.threshold > prev.threshold))
      throw std::invalid_argument(
          "DetectionCurve: thresholds must be strictly increasing");
    if (cur.p_fa > prev.p_fa + 1e-10 || cur.p_d > prev.p_d + 1e-10)
      throw std::invalid_argument(
          "DetectionCurve: p_fa and p_d must be nonincreasing in eta");
  }
  DetectionCurve curve;
  curve.points_ = std::move(points);
  return curve;
}

double test_statistic(const std::vector<Eigen::VectorXcd> &samples) {
  if (samples.empty())
    throw std::invalid_argument("test_statistic: empty sample set");
  const Eigen::Index m = samples.front().size();
  Eigen::MatrixXcd sample_cov = Eigen::MatrixXcd::Zero(m, m);
  for (const Eigen::VectorXcd &y : samples) {
    if (y.size() != m)
      throw std::invalid_argument("test_statistic: inconsistent sample length");
    sample_cov.noalias() += y * y.adjoint();
  }
  sample_cov /= static_cast<double>(samples.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sample_cov,
                                                     Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double p_fa(double eta, const DetectorConfig &cfg) {
  if (eta < 0.0) throw std::invalid_argument("p_fa: eta must be >= 0");
  return std::clamp(1.0 - ts_cdf(eta, cfg.null_spectrum()), 0.0, 1.0);
}

double p_d(double eta, const DetectorConfig &cfg) {
  if (eta < 0.0) throw std::invalid_argument("p_d: eta must be >= 0");
  return std::clamp(1.0 - ts_cdf(eta, cfg.signal_spectrum()), 0.0, 1.0);
}

double threshold_for_pfa(double target, const DetectorConfig &cfg) {
  if (!(target > 0.0) || !(target < 1.0))
    throw std::invalid_argument("threshold_for_pfa: target must be in (0, 1)");

  // p_fa is 1 at eta = 0 and decreases monotonically; grow the upper end
  // geometrically until it falls below the target, then bisect.
  double lo = 0.0;
  double hi = std::max(cfg.sigma0().trace(), 1e-12);
  int doublings = 0;
  while (p_fa(hi, cfg) > target) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      std::ostringstream err;
      err << "threshold_for_pfa: failed to bracket target " << target
          << " after 200 doublings (p_fa(" << hi << ") still above target)";
      throw numerical_failure(err.str());
    }
  }

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    mid = 0.5 * (lo + hi);
    const double value = p_fa(mid, cfg);
    if (std::abs(value - target) <= 1e-9) return mid;
    if (value > target)
      lo = mid;
    else
      hi = mid;
  }
  std::ostringstream err;
  err << "threshold_for_pfa: bisection stalled at eta=" << mid << " (p_fa="
      << p_fa(mid, cfg) << ", target=" << target << ")";
  throw numerical_failure(err.str());
}

DetectionCurve roc(const DetectorConfig &cfg,
                   const std::vector<double> &pfa_targets) {
  if (pfa_targets.empty())
    throw std::invalid_argument("roc: empty target grid");
  for (std::size_t i = 0; i < pfa_targets.size(); ++i) {
    if (!(pfa_targets[i] > 0.0) || !(pfa_targets[i] < 1.0))
      throw std::invalid_argument("roc: targets must lie in (0, 1)");
    if (i > 0 && !(pfa_targets[i] > pfa_targets[i - 1]))
      throw std::invalid_argument("roc: targets must be strictly increasing");
  }
  std::vector<RocPoint> points;
  points.reserve(pfa_targets.size());
  // Walk targets from largest to smallest so thresholds come out ascending.
  for (auto it = pfa_targets.rbegin(); it != pfa_targets.rend(); ++it) {
    RocPoint point;
    point.threshold = threshold_for_pfa(*it, cfg);
    point.p_fa = *it;
    point.p_d = p_d(point.threshold, cfg);
    points.push_back(point);
  }
  return DetectionCurve::from(std::move(points));
}

}  // namespace sense
