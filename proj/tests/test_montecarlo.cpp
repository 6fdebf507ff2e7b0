// SPDX-License-Identifier: Apache-2.0
//
// Unit tests for the simulation oracle: correlated sampling, hypothesis
// simulation in both modes, empirical rates, and KS distances.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sense/montecarlo.hpp"
#include "sense/ris.hpp"

using namespace sense;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

SystemGeometry small_geometry() {
  SystemGeometry g;
  g.su_antennas = 4;
  g.ris_nx = 2;
  g.ris_ny = 2;
  return g;
}

}  // namespace

TEST_CASE("derive_stream_seed: deterministic and index-sensitive") {
  const auto a = derive_stream_seed(123, 0);
  CHECK(a == derive_stream_seed(123, 0));
  CHECK(a != derive_stream_seed(123, 1));
  CHECK(a != derive_stream_seed(124, 0));
  // Nearby indices must not collide (bijective mixing, no short cycles).
  for (std::uint64_t i = 1; i < 64; ++i)
    CHECK(derive_stream_seed(7, i) != derive_stream_seed(7, i - 1));
}

TEST_CASE("CorrelatedGaussianSampler: white covariance moments") {
  auto eye = HermitianMatrix::from(MatrixXcd::Identity(4, 4), true);
  CorrelatedGaussianSampler sampler(eye);
  std::mt19937_64 rng(2024);
  const int n = 100000;
  VectorXcd mean = VectorXcd::Zero(4);
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    VectorXcd z = sampler.draw(rng);
    mean += z;
    energy += z.squaredNorm();
  }
  mean /= double(n);
  energy /= double(n) * 4.0;  // per-component second moment
  const double bound = 5.0 / std::sqrt(double(n));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(mean(i)) < bound);
  CHECK(energy == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("CorrelatedGaussianSampler: degenerate directions stay zero") {
  MatrixXcd sigma = MatrixXcd::Zero(2, 2);
  sigma(0, 0) = 2.0;
  CorrelatedGaussianSampler sampler(HermitianMatrix::from(sigma, true));
  std::mt19937_64 rng(5);
  bool first_nonzero = false;
  for (int i = 0; i < 200; ++i) {
    VectorXcd z = sampler.draw(rng);
    CHECK(z(1) == Complex(0.0, 0.0));
    if (std::abs(z(0)) > 0.0) first_nonzero = true;
  }
  CHECK(first_nonzero);
}

TEST_CASE("CorrelatedGaussianSampler: reproduces a cross-covariance entry") {
  auto sigma = noise_covariance(8, 0.2, 1.0);
  CorrelatedGaussianSampler sampler(sigma);
  std::mt19937_64 rng(11);
  const int n = 100000;
  Complex acc = 0.0;
  for (int i = 0; i < n; ++i) {
    VectorXcd z = sampler.draw(rng);
    acc += z(1) * std::conj(z(2));
  }
  acc /= double(n);
  // E[z1 conj(z2)] = rho = 0.2; five standard errors of the estimator.
  CHECK(std::abs(acc - Complex(0.2, 0.0)) < 5.0 * 1.1 / std::sqrt(double(n)));
}

TEST_CASE("CorrelatedGaussianSampler: rejects indefinite covariance") {
  MatrixXcd sigma = MatrixXcd::Zero(2, 2);
  sigma(0, 0) = 1.0;
  sigma(1, 1) = -1.0;
  CHECK_THROWS_AS(CorrelatedGaussianSampler(HermitianMatrix::from(sigma)),
                  numerical_failure);
}

TEST_CASE("sample_correlated_gaussian: shape and count validation") {
  auto sigma = noise_covariance(3, 0.2, 1.0);
  std::mt19937_64 rng(1);
  auto draws = sample_correlated_gaussian(sigma, 7, rng);
  REQUIRE(draws.size() == 7);
  for (const auto &z : draws) CHECK(z.size() == 3);
  CHECK_THROWS_AS(sample_correlated_gaussian(sigma, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("simulate_ts: plan validation") {
  auto model =
      make_system_upsilon(small_geometry(), 10, 0.2, -10.0, RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 0;
  plan.samples = 10;
  CHECK_THROWS_AS(simulate_ts(Hypothesis::h0, model, plan),
                  std::invalid_argument);
  plan.trials = 5;
  plan.samples = 8;  // disagrees with model.samples = 10
  CHECK_THROWS_AS(simulate_ts(Hypothesis::h0, model, plan),
                  std::invalid_argument);
}

TEST_CASE("simulate_ts: null distribution matches the exact CDF") {
  auto model =
      make_system_upsilon(small_geometry(), 10, 0.2, -10.0, RisMode::absent);
  SimulationPlan plan;
  plan.trials = 20000;
  plan.samples = 10;
  plan.seed = 314159;
  auto ts = simulate_ts(Hypothesis::h0, model, plan);
  REQUIRE(ts.size() == 20000);
  auto spec = model.detector_config().null_spectrum();
  const double ks =
      ks_statistic(ts, [&](double x) { return ts_cdf(x, spec); });
  CHECK(ks < ks_critical_value(ts.size()));
}

TEST_CASE("simulate_ts: physical and distributional H1 modes agree") {
  auto model =
      make_system_upsilon(small_geometry(), 6, 0.2, -5.0, RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 30000;
  plan.samples = 6;
  plan.seed = 1001;
  plan.mode = SimulationPlan::Mode::physical;
  auto physical = simulate_ts(Hypothesis::h1, model, plan);
  plan.seed = 2002;
  plan.mode = SimulationPlan::Mode::distributional;
  auto distributional = simulate_ts(Hypothesis::h1, model, plan);
  const double ks = ks_two_sample(physical, distributional);
  CHECK(ks < ks_two_sample_critical_value(physical.size(),
                                          distributional.size()));
}

TEST_CASE("simulate_ts: zero transmit power collapses H1 onto H0") {
  auto model =
      make_system(small_geometry(), 10, 0.2, 1.0, 0.0, RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 20000;
  plan.samples = 10;
  plan.seed = 42;
  plan.mode = SimulationPlan::Mode::physical;
  auto h1 = simulate_ts(Hypothesis::h1, model, plan);
  plan.seed = 43;
  auto h0 = simulate_ts(Hypothesis::h0, model, plan);
  CHECK(ks_two_sample(h1, h0) <
        ks_two_sample_critical_value(h1.size(), h0.size()));
}

TEST_CASE("simulate_ts: bit-reproducible for a fixed seed") {
  auto model =
      make_system_upsilon(small_geometry(), 10, 0.2, -10.0, RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 64;
  plan.samples = 10;
  plan.seed = 777;
  plan.mode = SimulationPlan::Mode::physical;
  auto a = simulate_ts(Hypothesis::h1, model, plan);
  auto b = simulate_ts(Hypothesis::h1, model, plan);
  CHECK(a == b);
  plan.seed = 778;
  auto c = simulate_ts(Hypothesis::h1, model, plan);
  CHECK(a != c);
}

TEST_CASE("empirical_rates: counting and edge rules") {
  std::vector<double> ts = {1.0, 1.0, 1.0, 1.0};
  auto rates = empirical_rates(ts, {0.5, 1.0, 2.0});
  REQUIRE(rates.size() == 3);
  CHECK(rates[0].frequency == 1.0);
  CHECK(rates[0].std_error == 0.0);
  CHECK(rates[1].frequency == 0.0);  // exceedance is strict
  CHECK(rates[2].frequency == 0.0);
  auto half = empirical_rates({1.0, 2.0}, {1.0});
  CHECK(half[0].frequency == 0.5);
  CHECK(half[0].std_error ==
        doctest::Approx(std::sqrt(0.5 * 0.5 / 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(empirical_rates({}, {1.0}), std::invalid_argument);
}

TEST_CASE("empirical_rates: false-alarm frequency at the exact threshold") {
  auto model =
      make_system_upsilon(small_geometry(), 10, 0.2, -10.0, RisMode::absent);
  auto cfg = model.detector_config();
  const double eta = threshold_for_pfa(0.1, cfg);
  SimulationPlan plan;
  plan.trials = 50000;
  plan.samples = 10;
  plan.seed = 8888;
  auto ts = simulate_ts(Hypothesis::h0, model, plan);
  auto rates = empirical_rates(ts, {eta});
  const double se = std::sqrt(0.1 * 0.9 / double(plan.trials));
  CHECK(std::abs(rates[0].frequency - 0.1) <= 3.0 * se);
}

TEST_CASE("ks_statistic: calibrated on the uniform distribution") {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> draws(20000);
  for (auto &d : draws) d = unif(rng);
  auto identity_cdf = [](double x) {
    return std::clamp(x, 0.0, 1.0);
  };
  CHECK(ks_statistic(draws, identity_cdf) < ks_critical_value(draws.size()));
  // A deterministic shift of the sample must be detected.
  for (auto &d : draws) d += 0.05;
  CHECK(ks_statistic(draws, identity_cdf) > ks_critical_value(draws.size()));
  CHECK_THROWS_AS(ks_statistic({}, identity_cdf), std::invalid_argument);
}

TEST_CASE("ks_statistic: distance shrinks as the sample grows") {
  auto exp_cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); };
  std::mt19937_64 rng(515);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> small(1000), large(100000);
  for (auto &d : small) d = expo(rng);
  for (auto &d : large) d = expo(rng);
  const double d_small = ks_statistic(small, exp_cdf);
  const double d_large = ks_statistic(large, exp_cdf);
  CHECK(d_small < ks_critical_value(small.size()));
  CHECK(d_large < ks_critical_value(large.size()));
  CHECK(d_large < d_small);
}

TEST_CASE("ks_two_sample: detects a shifted pair, passes an identical law") {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(10000), b(10000), shifted(10000);
  for (auto &d : a) d = normal(rng);
  for (auto &d : b) d = normal(rng);
  for (auto &d : shifted) d = normal(rng) + 0.1;
  CHECK(ks_two_sample(a, b) <
        ks_two_sample_critical_value(a.size(), b.size()));
  CHECK(ks_two_sample(a, shifted) >
        ks_two_sample_critical_value(a.size(), shifted.size()));
}

TEST_CASE("ks critical values: closed forms at 1% significance") {
  CHECK(ks_critical_value(10000) == doctest::Approx(0.016276).epsilon(1e-12));
  CHECK(ks_two_sample_critical_value(10000, 10000) ==
        doctest::Approx(1.6276 * std::sqrt(2.0 / 10000.0)).epsilon(1e-12));
}

TEST_CASE("SystemModel: trace bookkeeping of the signal covariance") {
  SystemGeometry g;  // reference geometry
  auto model = make_system_upsilon(g, 10, 0.2, -10.0, RisMode::optimal);
  REQUIRE(model.ris.has_value());
  // Tr(Sigma1) = Tr(R_w) + beta P Tr(R_d) + nu P S(psi), with S the trace
  // objective of the configured phases.
  const double s = trace_objective(model.ris->phases, model.ris->channel,
                                   model.ris->r_ris);
  const double expect = model.r_noise.trace() +
                        model.pathloss.beta * model.transmit_power *
                            model.r_direct.trace() +
                        model.pathloss.nu * model.transmit_power * s;
  CHECK(model.sigma1().trace() == doctest::Approx(expect).epsilon(1e-12));
  // Frozen value for the reference scenario at -10 dB.
  CHECK(model.sigma1().trace() ==
        doctest::Approx(10.2915764569379).epsilon(1e-6));
}
