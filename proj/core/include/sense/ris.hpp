// SPDX-License-Identifier: Apache-2.0
//
// RIS phase configuration: the unit-modulus reflection vector, the signal
// covariance it induces, the Hadamard-form trace objective, and the
// statistically optimal (uniform-phase) configuration.

#pragma once

#include <cstdint>

#include "sense/model.hpp"

namespace sense {

/// Vector of passive reflection coefficients, one per RIS element; every
/// entry has unit modulus within 1e-12.
class PhaseVector {
public:
  /// Validates and wraps `psi`; throws std::invalid_argument if any entry is
  /// off the unit circle by more than 1e-12.
  static PhaseVector from(const Eigen::VectorXcd &psi);

  /// All entries equal to e^{j global_phase}.
  static PhaseVector uniform(int n, double global_phase = 0.0);

  /// I.i.d. uniform random phases, deterministic for a given seed.
  static PhaseVector random(int n, std::uint64_t seed);

  const Eigen::VectorXcd &coefficients() const { return psi_; }
  Eigen::MatrixXcd diagonal() const { return psi_.asDiagonal(); }
  int size() const { return static_cast<int>(psi_.size()); }

private:
  explicit PhaseVector(Eigen::VectorXcd psi) : psi_(std::move(psi)) {}
  Eigen::VectorXcd psi_;
};

/// The mean-trace-optimal configuration: all phases equal to `global_phase`
/// (the objective is invariant to the common rotation).
PhaseVector optimal_phases(int n, double global_phase = 0.0);

/// Signal covariance for a given phase configuration:
///   R_s = beta P_s R_d + nu P_s H diag(psi) R_h diag(psi)^H H^H.
/// Hermitian PSD for every unit-modulus psi.
HermitianMatrix signal_covariance(const PhaseVector &psi, const LoSChannel &h,
                                  const HermitianMatrix &r_direct,
                                  const HermitianMatrix &r_ris,
                                  const PathLoss &pl, double transmit_power);

/// Mean-energy objective of the indirect path in Hadamard form:
///   psi^H ((H^H H) (.) R_h) psi  ==  Tr(H diag(psi) R_h diag(psi)^H H^H),
/// where (.) is the entrywise product.
double trace_objective(const PhaseVector &psi, const LoSChannel &h,
                       const HermitianMatrix &r_ris);

}  // namespace sense
