// SPDX-License-Identifier: Apache-2.0

#include "sense/wishart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

namespace sense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gamma_args(int a, double x) {
  if (a < 1)
    throw std::invalid_argument("incomplete gamma: a must be a positive integer");
  if (x < 0.0 || std::isnan(x))
    throw std::invalid_argument("incomplete gamma: x must be >= 0");
}

// log of the series sum for P(a, x), valid for x < a + 1:
//   P(a, x) = x^a e^{-x} / Gamma(a+1) * sum_{k>=0} x^k / ((a+1)...(a+k)).
double log_gamma_p_series(int a, double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 0; k < 500; ++k) {
    term *= x / (a + 1.0 + k);
    sum += term;
    if (term < sum * 1e-17)
      return a * std::log(x) - x - std::lgamma(a + 1.0) + std::log(sum);
  }
  std::ostringstream err;
  err << "incomplete gamma series failed to converge (a=" << a << ", x=" << x
      << ")";
  throw numerical_failure(err.str());
}

// Complement Q(a, x) by modified Lentz continued fraction, valid for
// x >= a + 1 (where Q < 1/2 and forming P = 1 - Q loses no precision).
double gamma_q_continued_fraction(int a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (i - static_cast<double>(a));
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17)
      return std::exp(a * std::log(x) - x - std::lgamma(a)) * h;
  }
  std::ostringstream err;
  err << "incomplete gamma continued fraction failed to converge (a=" << a
      << ", x=" << x << ")";
  throw numerical_failure(err.str());
}

}  // namespace

double log_regularized_gamma_p(int a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return -kInf;
  if (x < a + 1.0) return log_gamma_p_series(a, x);
  const double q = gamma_q_continued_fraction(a, x);
  return std::log1p(-q);
}

double regularized_gamma_p(int a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(log_gamma_p_series(a, x));
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double lower_incomplete_gamma(int a, double x) {
  check_gamma_args(a, x);
  if (a <= 170)  // Gamma(a) representable: use the direct product
    return std::tgamma(static_cast<double>(a)) * regularized_gamma_p(a, x);
  return std::exp(std::lgamma(static_cast<double>(a)) +
                  log_regularized_gamma_p(a, x));
}

WishartSpectrum WishartSpectrum::from_inverse_eigenvalues(
    std::vector<double> lambdas, int sample_count) {
  const int m = static_cast<int>(lambdas.size());
  if (m < 1)
    throw std::invalid_argument("WishartSpectrum: empty eigenvalue list");
  if (sample_count < m) {
    std::ostringstream err;
    err << "WishartSpectrum: sample_count " << sample_count
        << " < dimension " << m << " (singular sample covariance)";
    throw unsupported_configuration(err.str());
  }
  for (double v : lambdas)
    if (!(v > 0.0))
      throw std::invalid_argument(
          "WishartSpectrum: eigenvalues must be positive");

  std::sort(lambdas.begin(), lambdas.end());
  const double scale = lambdas.back();
  const double gap_floor = 1e-9 * scale;

  // Spread near-coincident clusters symmetrically; retry with a larger step
  // if the perturbed values still collide (pathological spacing only).
  const std::vector<double> original = lambdas;
  double step = 2e-8 * scale;
  for (int attempt = 0; attempt < 4; ++attempt) {
    lambdas = original;
    std::size_t i = 0;
    while (i < lambdas.size()) {
      std::size_t j = i + 1;
      while (j < lambdas.size() && lambdas[j] - lambdas[j - 1] < gap_floor)
        ++j;
      const std::size_t size = j - i;
      if (size > 1) {
        const double center =
            std::accumulate(lambdas.begin() + static_cast<std::ptrdiff_t>(i),
                            lambdas.begin() + static_cast<std::ptrdiff_t>(j),
                            0.0) /
            static_cast<double>(size);
        for (std::size_t k = 0; k < size; ++k)
          lambdas[i + k] =
              center + (static_cast<double>(k) - (size - 1) / 2.0) * step;
      }
      i = j;
    }
    std::sort(lambdas.begin(), lambdas.end());
    bool distinct = true;
    for (std::size_t k = 1; k < lambdas.size(); ++k)
      if (lambdas[k] - lambdas[k - 1] < gap_floor) distinct = false;
    if (distinct) break;
    step *= 2.0;
    if (attempt == 3) {
      std::ostringstream err;
      err << "WishartSpectrum: could not separate eigenvalue clusters (m=" << m
          << ", scale=" << scale << ")";
      throw numerical_failure(err.str());
    }
  }

  WishartSpectrum spec;
  spec.lambdas_ = std::move(lambdas);
  spec.sample_count_ = sample_count;

  // log norm = n * sum_j log(lambda_j) - sum_i lgamma(n - i + 1)
  //          - sum_{i<j} log(lambda_j - lambda_i)
  // (the (a-1)! factors of the cofactor expansion cancel the Gamma(m-i+1)
  // products exactly; ascending differences keep the Vandermonde positive).
  double log_norm = 0.0;
  for (double v : spec.lambdas_) log_norm += sample_count * std::log(v);
  for (int i = 1; i <= m; ++i)
    log_norm -= std::lgamma(static_cast<double>(sample_count - i + 1));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      log_norm -= std::log(spec.lambdas_[static_cast<std::size_t>(j)] -
                           spec.lambdas_[static_cast<std::size_t>(i)]);
  spec.log_norm_ = log_norm;
  return spec;
}

WishartSpectrum WishartSpectrum::from_covariance(const HermitianMatrix &sigma,
                                                 int sample_count) {
  if (sigma.dim() < 1)
    throw std::invalid_argument("WishartSpectrum: empty covariance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.matrix(),
                                                     Eigen::EigenvaluesOnly);
  const Eigen::VectorXd &evals = es.eigenvalues();  // ascending
  if (!(evals.minCoeff() > 0.0)) {
    std::ostringstream err;
    err << "WishartSpectrum: covariance not positive definite (min eigenvalue "
        << evals.minCoeff() << ")";
    throw std::invalid_argument(err.str());
  }
  std::vector<double> lambdas(static_cast<std::size_t>(evals.size()));
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    lambdas[static_cast<std::size_t>(i)] = 1.0 / evals(i);
  return from_inverse_eigenvalues(std::move(lambdas), sample_count);
}

WishartSpectrum WishartSpectrum::debug_negated_norm() const {
  WishartSpectrum spec = *this;
  spec.norm_sign_ = -spec.norm_sign_;
  return spec;
}

WishartSpectrum spectrum_of(const HermitianMatrix &sigma, int sample_count) {
  return WishartSpectrum::from_covariance(sigma, sample_count);
}

double max_eig_cdf(double eta, const WishartSpectrum &spectrum) {
  if (std::isnan(eta))
    throw std::invalid_argument("max_eig_cdf: eta is NaN");
  if (eta <= 0.0) return 0.0;

  const int m = spectrum.dim();
  const int n = spectrum.sample_count();
  const std::vector<double> &lambdas = spectrum.lambdas();

  // Deep-saturation shortcut.  For x >= 2a the complement obeys
  // Q(a, x) <= 2 x^(a-1) e^(-x) / Gamma(a), and the largest shape a = n has
  // the slowest-decaying tail.  Once every column satisfies
  // log Q(n, eta lambda_j) < -120 the matrix equals its eta -> infinity
  // limit to ~1e-52, where the normalization makes the determinant exactly
  // one; evaluating the near-singular limit numerically would only inject
  // conditioning noise into a value that is 1 to machine precision.
  if (spectrum.norm_sign() > 0.0) {
    bool saturated = true;
    for (double lam : lambdas) {
      const double x = eta * lam;
      if (x < 2.0 * n) {
        saturated = false;
        break;
      }
      const double log_q_bound = (n - 1) * std::log(x) - x -
                                 std::lgamma(static_cast<double>(n)) +
                                 std::numbers::ln2;
      if (log_q_bound > -120.0) {
        saturated = false;
        break;
      }
    }
    if (saturated) return 1.0;
  }

  // Log-domain entries: log Lambda_ij = log gamma(n-i+1, eta lambda_j)
  //                                   - (n-i+1) log lambda_j.
  Eigen::MatrixXd log_entries(m, m);
  for (int i = 0; i < m; ++i) {
    const int a = n - i;  // n - (i+1) + 1 for 1-based row i+1
    for (int j = 0; j < m; ++j) {
      const double lam = lambdas[static_cast<std::size_t>(j)];
      log_entries(i, j) = std::lgamma(static_cast<double>(a)) +
                          log_regularized_gamma_p(a, eta * lam) -
                          a * std::log(lam);
    }
  }

  // Factor the max out of each column so the scaled matrix has entries in
  // (0, 1]; the determinant of the scaled matrix is then well conditioned.
  double log_scale = spectrum.log_norm();
  Eigen::MatrixXd scaled(m, m);
  for (int j = 0; j < m; ++j) {
    const double col_max = log_entries.col(j).maxCoeff();
    if (col_max == -kInf) return 0.0;  // entire column underflows: det = 0
    log_scale += col_max;
    scaled.col(j) = (log_entries.col(j).array() - col_max).exp();
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  double sign = spectrum.norm_sign() *
                static_cast<double>(lu.permutationP().determinant());
  double log_det = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = lu.matrixLU()(i, i);
    if (d == 0.0) return 0.0;
    if (d < 0.0) sign = -sign;
    log_det += std::log(std::abs(d));
  }

  const double value = sign * std::exp(log_scale + log_det);
  if (std::isnan(value) || value < -1e-8 || value > 1.0 + 1e-8) {
    std::ostringstream err;
    err << "max_eig_cdf: determinant evaluation outside [0,1] (value=" << value
        << ", eta=" << eta << ", m=" << m << ", n=" << n
        << ", log_norm=" << spectrum.log_norm() << ")";
    throw numerical_failure(err.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

double ts_cdf(double eta, const WishartSpectrum &spectrum) {
  return max_eig_cdf(spectrum.sample_count() * eta, spectrum);
}

double ts_cdf(double eta, const HermitianMatrix &sigma, int sample_count) {
  return ts_cdf(eta, spectrum_of(sigma, sample_count));
}

}  // namespace sense
