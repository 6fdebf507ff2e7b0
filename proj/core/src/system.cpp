// SPDX-License-Identifier: Apache-2.0

#include "sense/system.hpp"

#include <cmath>

namespace sense {

HermitianMatrix SystemModel::signal_cov() const {
  if (ris.has_value())
    return signal_covariance(ris->phases, ris->channel, r_direct, ris->r_ris,
                             pathloss, transmit_power);
  return HermitianMatrix::from(
      pathloss.beta * transmit_power * r_direct.matrix(),
      /*positive_semidefinite=*/true);
}

HermitianMatrix SystemModel::sigma1() const {
  return HermitianMatrix::from(signal_cov().matrix() + r_noise.matrix(),
                               /*positive_semidefinite=*/true);
}

DetectorConfig SystemModel::detector_config() const {
  return DetectorConfig(sigma0(), sigma1(), samples);
}

namespace {

SystemModel assemble(const SystemGeometry &geometry, int samples, double rho,
                     double noise_variance, double transmit_power,
                     const PathLoss &pathloss, RisMode mode,
                     std::uint64_t phase_seed) {
  geometry.validate();
  if (samples < 1)
    throw std::invalid_argument("SystemModel: samples must be >= 1");

  SystemModel model;
  model.geometry = geometry;
  model.samples = samples;
  model.transmit_power = transmit_power;
  model.pathloss = pathloss;
  model.r_direct = sinc_covariance(
      ula_positions(geometry.su_antennas, geometry.spacing),
      geometry.wavelength);
  model.r_noise = noise_covariance(geometry.su_antennas, rho, noise_variance);

  if (mode != RisMode::absent) {
    RisLink link{
        sinc_covariance(
            upa_positions(geometry.ris_nx, geometry.ris_ny, geometry.spacing),
            geometry.wavelength),
        los_channel(geometry),
        mode == RisMode::optimal
            ? optimal_phases(geometry.ris_elements())
            : PhaseVector::random(geometry.ris_elements(), phase_seed)};
    model.ris = std::move(link);
  }
  return model;
}

}  // namespace

SystemModel make_system(const SystemGeometry &geometry, int samples, double rho,
                        double noise_variance, double transmit_power_w,
                        RisMode mode, std::uint64_t phase_seed) {
  if (!(transmit_power_w >= 0.0))
    throw std::invalid_argument("SystemModel: transmit power must be >= 0");
  const PathLoss pl =
      path_losses(geometry.direct_distance, geometry.distance_ratio,
                  geometry.pathloss_exponent);
  return assemble(geometry, samples, rho, noise_variance, transmit_power_w, pl,
                  mode, phase_seed);
}

SystemModel make_system_upsilon(const SystemGeometry &geometry, int samples,
                                double rho, double upsilon_db, RisMode mode,
                                std::uint64_t phase_seed) {
  const double upsilon = std::pow(10.0, upsilon_db / 10.0);
  // Anchor beta P_s / sigma_w^2 directly: sigma_w^2 = 1, P_s = 1,
  // beta = Upsilon; distances only shape the indirect/direct ratio mu.
  PathLoss pl = path_losses(geometry.direct_distance, geometry.distance_ratio,
                            geometry.pathloss_exponent);
  pl.beta = upsilon;
  pl.nu = pl.mu * upsilon;
  return assemble(geometry, samples, rho, /*noise_variance=*/1.0,
                  /*transmit_power=*/1.0, pl, mode, phase_seed);
}

}  // namespace sense
