// SPDX-License-Identifier: Apache-2.0
//
// Unit tests for the incomplete-gamma kernels and the exact largest-
// eigenvalue CDF of the correlated complex Wishart matrix.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sense/detector.hpp"
#include "sense/montecarlo.hpp"
#include "sense/wishart.hpp"

using namespace sense;

namespace {

// Independent quadrature oracle for the lower incomplete gamma:
// integral of t^(a-1) e^(-t) over [0, x] by composite Simpson.
double gamma_by_quadrature(int a, double x, int intervals) {
  auto f = [a](double t) { return std::pow(t, a - 1) * std::exp(-t); };
  const double h = x / intervals;
  double sum = f(0.0) + f(x);
  for (int i = 1; i < intervals; ++i)
    sum += f(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Frozen reference spectrum: inverse eigenvalues of the exponential noise
// kernel with m = 8, rho = 0.2, sigma2 = 1, ascending.
const std::vector<double> kNoiseInverseEigs = {
    0.689321734360546, 0.755653521941923, 0.860192694486821,
    0.992700441197391, 1.13822711495893,  1.27869747120196,
    1.39559178952703,  1.47294856565872};
constexpr double kNoiseLogNorm = -11.5572429072525;

}  // namespace

TEST_CASE("regularized_gamma_p: exponential special case a = 1") {
  // P(1, x) = 1 - e^(-x); at x = ln 2 the value is exactly one half.
  CHECK(regularized_gamma_p(1, std::log(2.0)) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(regularized_gamma_p(1, 0.0) == 0.0);
}

TEST_CASE("lower_incomplete_gamma: saturated integral equals (a-1)!") {
  // gamma(5, 50) has absorbed essentially all of Gamma(5) = 24.
  CHECK(lower_incomplete_gamma(5, 50.0) == doctest::Approx(24.0).epsilon(1e-9));
  // Independent Simpson quadrature of the same integral.
  const double quad = gamma_by_quadrature(5, 50.0, 40000);
  CHECK(lower_incomplete_gamma(5, 50.0) ==
        doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("regularized_gamma_p: frozen mid-range value") {
  CHECK(regularized_gamma_p(3, 2.5) ==
        doctest::Approx(0.45618688411667035).epsilon(1e-13));
}

TEST_CASE("regularized_gamma_p: series and continued fraction agree") {
  // The implementation switches branch at x = a + 1; both sides must match
  // an independent quadrature and join continuously.
  const int a = 4;
  const double gamma_a = 6.0;  // (a-1)!
  const double lo = regularized_gamma_p(a, 4.999999);
  const double hi = regularized_gamma_p(a, 5.000001);
  CHECK(lo == doctest::Approx(gamma_by_quadrature(a, 4.999999, 20000) / gamma_a)
                  .epsilon(1e-10));
  CHECK(hi == doctest::Approx(gamma_by_quadrature(a, 5.000001, 20000) / gamma_a)
                  .epsilon(1e-10));
  CHECK(std::abs(hi - lo) < 1e-5);
}

TEST_CASE("regularized_gamma_p: monotone in x, limits 0 and 1") {
  double prev = 0.0;
  for (double x = 0.0; x <= 30.0; x += 0.25) {
    const double p = regularized_gamma_p(7, x);
    CHECK(p >= prev - 1e-15);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK(regularized_gamma_p(7, 200.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log_regularized_gamma_p: consistent with the linear value") {
  for (double x : {0.5, 2.0, 7.5, 20.0}) {
    const double p = regularized_gamma_p(6, x);
    CHECK(std::exp(log_regularized_gamma_p(6, x)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(std::isinf(log_regularized_gamma_p(3, 0.0)));
}

TEST_CASE("log_regularized_gamma_p: survives deep underflow territory") {
  // P(60, 1) ~ 1e-82: representable, but the log form must agree and stay
  // finite well past the double underflow threshold at larger a.
  const double p = regularized_gamma_p(60, 1.0);
  REQUIRE(p > 0.0);
  CHECK(std::exp(log_regularized_gamma_p(60, 1.0)) ==
        doctest::Approx(p).epsilon(1e-10));
  const double lp = log_regularized_gamma_p(300, 1.0);
  CHECK(std::isfinite(lp));
  CHECK(lp < -700.0);  // linear evaluation would underflow to zero
}

TEST_CASE("regularized_gamma_p: domain validation") {
  CHECK_THROWS_AS(regularized_gamma_p(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regularized_gamma_p(3, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(log_regularized_gamma_p(-1, 1.0), std::invalid_argument);
}

TEST_CASE("WishartSpectrum: frozen spectrum of the exponential noise kernel") {
  auto spec = spectrum_of(noise_covariance(8, 0.2, 1.0), 10);
  REQUIRE(spec.dim() == 8);
  CHECK(spec.sample_count() == 10);
  for (std::size_t i = 0; i < kNoiseInverseEigs.size(); ++i)
    CHECK(spec.lambdas()[i] ==
          doctest::Approx(kNoiseInverseEigs[i]).epsilon(1e-9));
  CHECK(spec.log_norm() == doctest::Approx(kNoiseLogNorm).epsilon(1e-9));
  CHECK(spec.norm_sign() == 1.0);
}

TEST_CASE("WishartSpectrum: coincident eigenvalues are spread symmetrically") {
  // Identity covariance has a fully degenerate spectrum; the evaluation
  // spreads the cluster by +/- 1e-8 around the common value.
  auto spec =
      spectrum_of(HermitianMatrix::from(Eigen::MatrixXcd::Identity(2, 2), true),
                  4);
  REQUIRE(spec.dim() == 2);
  CHECK(spec.lambdas()[0] == doctest::Approx(1.0 - 1e-8).epsilon(1e-12));
  CHECK(spec.lambdas()[1] == doctest::Approx(1.0 + 1e-8).epsilon(1e-12));
  CHECK(spec.lambdas()[1] > spec.lambdas()[0]);
}

TEST_CASE("WishartSpectrum: input validation") {
  auto sigma = noise_covariance(4, 0.2, 1.0);
  CHECK_THROWS_AS(spectrum_of(sigma, 3), unsupported_configuration);
  CHECK_NOTHROW(spectrum_of(sigma, 4));
  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(spectrum_of(HermitianMatrix::from(singular, true), 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(WishartSpectrum::from_inverse_eigenvalues({}, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(WishartSpectrum::from_inverse_eigenvalues({1.0, -2.0}, 3),
                  std::invalid_argument);
  // Order of the supplied eigenvalues is irrelevant: stored ascending.
  auto spec = WishartSpectrum::from_inverse_eigenvalues({2.0, 0.5, 1.0}, 5);
  CHECK(spec.lambdas() == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("max_eig_cdf: exact zero at and below the origin") {
  auto spec = spectrum_of(noise_covariance(8, 0.2, 1.0), 10);
  CHECK(max_eig_cdf(0.0, spec) == 0.0);
  CHECK(max_eig_cdf(-3.0, spec) == 0.0);
}

TEST_CASE("ts_cdf: frozen values for the reference detection problem") {
  auto sigma = noise_covariance(8, 0.2, 1.0);
  CHECK(ts_cdf(1.5, sigma, 10) ==
        doctest::Approx(4.51568882795597e-05).epsilon(1e-8));
  CHECK(ts_cdf(2.0, sigma, 10) ==
        doctest::Approx(0.0177852204724168).epsilon(1e-8));
  CHECK(ts_cdf(2.5, sigma, 10) ==
        doctest::Approx(0.239643182007299).epsilon(1e-8));
  CHECK(ts_cdf(3.0, sigma, 10) ==
        doctest::Approx(0.6610416015247).epsilon(1e-8));
}

TEST_CASE("max_eig_cdf: monotone nondecreasing and saturating") {
  auto spec = spectrum_of(noise_covariance(8, 0.2, 1.0), 10);
  double prev = 0.0;
  for (double eta = 0.0; eta <= 60.0; eta += 0.5) {
    const double c = max_eig_cdf(eta, spec);
    CHECK(c >= prev - 1e-12);
    CHECK(c <= 1.0);
    prev = c;
  }
  const double far = 100.0 * spec.sample_count() / spec.lambdas().front();
  CHECK(max_eig_cdf(far, spec) >= 1.0 - 1e-6);
}

TEST_CASE("max_eig_cdf: m = 1 reduces to the regularized gamma") {
  // Single antenna: n * alpha_max is a Gamma(n, sigma2) sum, so the CDF is
  // P(n, eta * lambda) with lambda = 1 / sigma2.
  const double lambda = 0.5;
  for (int n : {1, 5}) {
    auto spec = WishartSpectrum::from_inverse_eigenvalues({lambda}, n);
    for (double eta = 0.1; eta <= 40.0; eta += 0.7) {
      CHECK(std::abs(max_eig_cdf(eta, spec) -
                     regularized_gamma_p(n, eta * lambda)) <= 1e-12);
    }
  }
}

TEST_CASE("ts_cdf: single-sample scalar case is the exponential CDF") {
  Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
  auto sigma = HermitianMatrix::from(one, true);
  for (double eta : {0.25, 1.0, 2.0, 5.0}) {
    CHECK(ts_cdf(eta, sigma, 1) ==
          doctest::Approx(1.0 - std::exp(-eta)).epsilon(1e-12));
  }
}

TEST_CASE("max_eig_cdf: corrupted normalization sign is caught") {
  auto spec = WishartSpectrum::from_inverse_eigenvalues({1.0, 2.0}, 4);
  auto bad = spec.debug_negated_norm();
  // Far in the upper tail the corrupted evaluation lands near -1, which is
  // outside the clamp band around [0, 1].
  CHECK_THROWS_AS(max_eig_cdf(30.0, bad), numerical_failure);
  CHECK(max_eig_cdf(30.0, spec) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ts_cdf: Monte Carlo KS agreement for a 4-antenna problem") {
  auto sigma = noise_covariance(4, 0.2, 1.0);
  const int samples = 10;
  auto spec = spectrum_of(sigma, samples);
  std::mt19937_64 rng(0x5eed0001ULL);
  const int trials = 20000;
  std::vector<double> ts(trials);
  for (int t = 0; t < trials; ++t)
    ts[t] = test_statistic(sample_correlated_gaussian(sigma, samples, rng));
  const double ks =
      ks_statistic(ts, [&](double x) { return ts_cdf(x, spec); });
  CHECK(ks < ks_critical_value(trials));
}
