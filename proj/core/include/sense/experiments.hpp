// SPDX-License-Identifier: Apache-2.0
//
// Config-driven experiment runner: parses flat key=value configuration
// files, assembles scenario sweeps, reproduces the detection-performance
// figures as CSV tables, and runs the validation suite.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sense/montecarlo.hpp"

namespace sense {

/// Fully resolved experiment description.  Exactly one SNR entry point is
/// active: absolute transmit power (`tx_power_dbm`, combined with the
/// configured distances and noise variance) or the direct-link SNR override
/// (`upsilon_db` values, with noise variance fixed at 1).
struct ExperimentConfig {
  SystemGeometry geometry;
  int samples = 10;               // observations K per sensing window
  double rho = 0.2;               // noise correlation coefficient
  double noise_variance = 1.0;    // sigma_w^2 (watts)
  std::optional<double> tx_power_dbm;
  std::vector<double> upsilon_db;  // SNR-override sweep (dB)
  std::vector<RisMode> ris_modes{RisMode::optimal};
  std::string experiment;          // curves | roc | pd-vs-n | validate
  std::vector<int> n_list;         // RIS element sweep; 0 = no RIS
  std::vector<double> eta_grid;    // empty = auto-scaled
  std::vector<double> pfa_grid;    // empty = auto (log-spaced)
  double pfa_target = 0.1;         // operating point for pd-vs-n
  long long trials = 0;            // 0 = analytical columns only
  std::uint64_t seed = 1;
  std::string out_path;            // empty = stdout
  bool debug_corrupt_sign = false; // negative-control hook for validate
};

/// Parses a config file; errors carry "<file>:<line>:" prefixes.
ExperimentConfig load_config(const std::string &path);
ExperimentConfig parse_config(std::istream &in, const std::string &name);

/// Near-square power-of-two factorization used when a sweep asks for N
/// elements without explicit grid dimensions: nx = 2^ceil(log2(N)/2),
/// halved until it divides N.
std::pair<int, int> ris_grid_dims(int n);

/// CSV payload: '#'-prefixed metadata lines, a header row, and data rows.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable &table, std::ostream &out);

/// Decimal text with 15 significant digits (stable across reruns).
std::string format_number(double value);

/// Threshold sweep of P_FA and per-scenario P_MD, optionally confirmed by
/// Monte Carlo columns when trials > 0.
CsvTable run_curves(const ExperimentConfig &cfg);

/// ROC table over a P_FA target grid, one detection column per scenario.
CsvTable run_roc(const ExperimentConfig &cfg);

/// Detection probability at a fixed P_FA across the RIS-size sweep.
CsvTable run_pd_vs_n(const ExperimentConfig &cfg);

/// One named validation check with its outcome and diagnostics.
struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

/// Cross-module oracle suite: special-function identities, CDF
/// normalization, the m=1 reduction, KS agreement with simulation, the
/// Hadamard identity, threshold inversion round-trips, physical vs
/// distributional equivalence, sampler covariance, and SNR bookkeeping.
ValidationReport run_validate(const ExperimentConfig &cfg);

/// Dispatches on cfg.experiment, writes results to cfg.out_path (or
/// `fallback_out` when no path is configured), and returns the process exit
/// status (nonzero when validation fails).
int run_experiment(const ExperimentConfig &cfg, std::ostream &fallback_out);

}  // namespace sense
