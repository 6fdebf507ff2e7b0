// SPDX-License-Identifier: Apache-2.0

#include "sense/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sense {

namespace {

// splitmix64 finalizer: bijective 64-bit mixing (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

CorrelatedGaussianSampler::CorrelatedGaussianSampler(
    const HermitianMatrix &sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.matrix());
  const Eigen::VectorXd &vals = es.eigenvalues();
  const double max_val = std::max(vals.maxCoeff(), 0.0);
  if (vals.minCoeff() < -1e-10 * std::max(max_val, 1e-300)) {
    std::ostringstream err;
    err << "CorrelatedGaussianSampler: covariance not PSD (min eigenvalue "
        << vals.minCoeff() << ", max " << max_val << ")";
    throw numerical_failure(err.str());
  }
  // Zero out numerically-zero eigenvalues instead of flooring them: a
  // degenerate direction must produce exactly zero samples.
  Eigen::VectorXd roots(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    roots(i) = vals(i) > 0.0 ? std::sqrt(vals(i)) : 0.0;
  factor_ = es.eigenvectors() * roots.asDiagonal();
}

Eigen::VectorXcd CorrelatedGaussianSampler::draw(std::mt19937_64 &rng) const {
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  Eigen::VectorXcd z(dim());
  const double scale = std::numbers::sqrt2 / 2.0;  // parts have variance 1/2
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double re = unit_normal(rng);
    const double im = unit_normal(rng);
    z(i) = Complex(re * scale, im * scale);
  }
  return factor_ * z;
}

std::vector<Eigen::VectorXcd> sample_correlated_gaussian(
    const HermitianMatrix &sigma, int count, std::mt19937_64 &rng) {
  if (count < 1)
    throw std::invalid_argument("sample_correlated_gaussian: count must be >= 1");
  const CorrelatedGaussianSampler sampler(sigma);
  std::vector<Eigen::VectorXcd> draws;
  draws.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) draws.push_back(sampler.draw(rng));
  return draws;
}

std::vector<double> simulate_ts(Hypothesis hypothesis, const SystemModel &model,
                                const SimulationPlan &plan) {
  if (plan.trials < 1)
    throw std::invalid_argument("simulate_ts: trials must be >= 1");
  if (plan.samples < 1)
    throw std::invalid_argument("simulate_ts: samples must be >= 1");
  if (plan.samples != model.samples)
    throw std::invalid_argument(
        "simulate_ts: plan.samples disagrees with model.samples");

  const bool physical = plan.mode == SimulationPlan::Mode::physical;
  const bool with_signal = hypothesis == Hypothesis::h1;

  // Pre-factor every covariance we may draw from; per-trial work is then
  // matrix-vector products and one small eigensolve.
  const CorrelatedGaussianSampler noise_sampler(model.r_noise);
  std::optional<CorrelatedGaussianSampler> direct_sampler;
  std::optional<CorrelatedGaussianSampler> ris_sampler;
  std::optional<CorrelatedGaussianSampler> hypothesis_sampler;
  Eigen::MatrixXcd reflected;  // sqrt(nu) H diag(psi), M x N
  double sqrt_beta = 0.0;
  if (with_signal && physical) {
    direct_sampler.emplace(model.r_direct);
    sqrt_beta = std::sqrt(model.pathloss.beta);
    if (model.ris.has_value()) {
      ris_sampler.emplace(model.ris->r_ris);
      reflected = std::sqrt(model.pathloss.nu) * model.ris->channel.matrix *
                  model.ris->phases.diagonal();
    }
  } else if (with_signal) {
    hypothesis_sampler.emplace(model.sigma1());
  }

  const double sqrt_power = std::sqrt(model.transmit_power);
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(plan.trials));
  std::vector<Eigen::VectorXcd> window(
      static_cast<std::size_t>(plan.samples));

  for (long long trial = 0; trial < plan.trials; ++trial) {
    std::mt19937_64 rng(
        derive_stream_seed(plan.seed, static_cast<std::uint64_t>(trial)));
    std::uniform_real_distribution<double> symbol_phase(
        0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < plan.samples; ++k) {
      auto &y = window[static_cast<std::size_t>(k)];
      if (!with_signal) {
        y = noise_sampler.draw(rng);
      } else if (physical) {
        const Complex s = std::polar(sqrt_power, symbol_phase(rng));
        y = sqrt_beta * s * direct_sampler->draw(rng);
        if (ris_sampler.has_value())
          y.noalias() += s * (reflected * ris_sampler->draw(rng));
        y += noise_sampler.draw(rng);
      } else {
        y = hypothesis_sampler->draw(rng);
      }
    }
    ts.push_back(test_statistic(window));
  }
  return ts;
}

std::vector<RatePoint> empirical_rates(const std::vector<double> &ts_samples,
                                       const std::vector<double> &thresholds) {
  if (ts_samples.empty())
    throw std::invalid_argument("empirical_rates: empty sample list");
  const double n = static_cast<double>(ts_samples.size());
  std::vector<RatePoint> rates;
  rates.reserve(thresholds.size());
  for (double eta : thresholds) {
    const auto count = std::count_if(ts_samples.begin(), ts_samples.end(),
                                     [eta](double v) { return v > eta; });
    RatePoint point;
    point.threshold = eta;
    point.frequency = static_cast<double>(count) / n;
    point.std_error =
        std::sqrt(point.frequency * (1.0 - point.frequency) / n);
    rates.push_back(point);
  }
  return rates;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)> &cdf) {
  if (samples.empty())
    throw std::invalid_argument("ks_statistic: empty sample list");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    dist = std::max(dist, f - static_cast<double>(i) / n);
    dist = std::max(dist, static_cast<double>(i + 1) / n - f);
  }
  return dist;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample list");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double dist = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib])
      ++ia;
    else
      ++ib;
    dist = std::max(dist, std::abs(static_cast<double>(ia) / na -
                                   static_cast<double>(ib) / nb));
  }
  return dist;
}

double ks_critical_value(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical_value(std::size_t n_a, std::size_t n_b) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  return 1.6276 * std::sqrt((na + nb) / (na * nb));
}

}  // namespace sense
