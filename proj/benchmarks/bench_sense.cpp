// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: spectrum preparation, CDF evaluation,
// threshold inversion, and single-trial simulation in both modes.

#include <benchmark/benchmark.h>

#include "sense/montecarlo.hpp"

using namespace sense;

namespace {

SystemModel reference_model(RisMode mode) {
  return make_system_upsilon(SystemGeometry{}, 10, 0.2, -10.0, mode);
}

void BM_SpectrumOf(benchmark::State &state) {
  auto sigma = noise_covariance(static_cast<int>(state.range(0)), 0.2, 1.0);
  const int samples = static_cast<int>(state.range(0)) + 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(spectrum_of(sigma, samples));
}
BENCHMARK(BM_SpectrumOf)->Arg(4)->Arg(8)->Arg(16);

void BM_MaxEigCdf(benchmark::State &state) {
  auto spec = spectrum_of(noise_covariance(8, 0.2, 1.0), 10);
  double eta = 20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_eig_cdf(eta, spec));
    eta = eta >= 40.0 ? 20.0 : eta + 0.01;  // avoid a constant argument
  }
}
BENCHMARK(BM_MaxEigCdf);

void BM_ThresholdForPfa(benchmark::State &state) {
  auto cfg = reference_model(RisMode::optimal).detector_config();
  for (auto _ : state)
    benchmark::DoNotOptimize(threshold_for_pfa(0.1, cfg));
}
BENCHMARK(BM_ThresholdForPfa);

void BM_SimulateTrialPhysical(benchmark::State &state) {
  auto model = reference_model(RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 1;
  plan.samples = 10;
  plan.mode = SimulationPlan::Mode::physical;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    plan.seed = ++seed;
    benchmark::DoNotOptimize(simulate_ts(Hypothesis::h1, model, plan));
  }
}
BENCHMARK(BM_SimulateTrialPhysical);

void BM_SimulateTrialDistributional(benchmark::State &state) {
  auto model = reference_model(RisMode::optimal);
  SimulationPlan plan;
  plan.trials = 1;
  plan.samples = 10;
  plan.mode = SimulationPlan::Mode::distributional;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    plan.seed = ++seed;
    benchmark::DoNotOptimize(simulate_ts(Hypothesis::h1, model, plan));
  }
}
BENCHMARK(BM_SimulateTrialDistributional);

}  // namespace

BENCHMARK_MAIN();
