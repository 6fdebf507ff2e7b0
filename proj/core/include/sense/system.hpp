// SPDX-License-Identifier: Apache-2.0
//
// Assembled end-to-end system model: geometry, covariances, channel, RIS
// configuration and power bookkeeping, with the two supported SNR entry
// points (absolute transmit power, or direct-link SNR override).

#pragma once

#include <cstdint>
#include <optional>

#include "sense/detector.hpp"
#include "sense/ris.hpp"

namespace sense {

enum class RisMode { absent, optimal, random };

/// RIS side of the model: element correlation, LoS channel to the receiver,
/// and the configured reflection coefficients.
struct RisLink {
  HermitianMatrix r_ris;
  LoSChannel channel;
  PhaseVector phases;
};

/// Everything needed to evaluate closed forms and run simulations for one
/// scenario.  `pathloss` and `transmit_power` are effective values: with the
/// SNR-override entry point, beta absorbs the override and transmit_power
/// is 1 W.
struct SystemModel {
  SystemGeometry geometry;
  int samples = 10;  // observations K per sensing window
  double transmit_power = 1.0;
  PathLoss pathloss;
  HermitianMatrix r_direct;
  HermitianMatrix r_noise;
  std::optional<RisLink> ris;

  /// Signal covariance R_s (direct term plus indirect term when RIS present).
  HermitianMatrix signal_cov() const;
  /// Null-hypothesis covariance (noise only).
  const HermitianMatrix &sigma0() const { return r_noise; }
  /// Signal-present covariance R_s + R_w.
  HermitianMatrix sigma1() const;
  /// Detector with both Wishart spectra cached.
  DetectorConfig detector_config() const;
};

/// Builds the model from absolute quantities: transmit power in watts and
/// path losses derived from the configured distances.
SystemModel make_system(const SystemGeometry &geometry, int samples, double rho,
                        double noise_variance, double transmit_power_w,
                        RisMode mode, std::uint64_t phase_seed = 0);

/// Builds the model anchored to the direct-link per-antenna SNR
/// Upsilon = beta P_s / sigma_w^2 in dB: noise variance is fixed at 1,
/// beta = 10^(Upsilon/10), nu = mu * beta with mu from the geometry.
SystemModel make_system_upsilon(const SystemGeometry &geometry, int samples,
                                double rho, double upsilon_db, RisMode mode,
                                std::uint64_t phase_seed = 0);

}  // namespace sense
