// SPDX-License-Identifier: Apache-2.0

#include "sense/ris.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sense {

PhaseVector PhaseVector::from(const Eigen::VectorXcd &psi) {
  if (psi.size() < 1)
    throw std::invalid_argument("PhaseVector: empty coefficient vector");
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double off = std::abs(std::abs(psi(i)) - 1.0);
    if (off > 1e-12) {
      std::ostringstream err;
      err << "PhaseVector: entry " << i << " has modulus " << std::abs(psi(i))
          << " (off unit circle by " << off << ")";
      throw std::invalid_argument(err.str());
    }
  }
  return PhaseVector(psi);
}

PhaseVector PhaseVector::uniform(int n, double global_phase) {
  if (n < 1) throw std::invalid_argument("PhaseVector: n must be >= 1");
  Eigen::VectorXcd psi(n);
  psi.setConstant(std::polar(1.0, global_phase));
  return PhaseVector(std::move(psi));
}

PhaseVector PhaseVector::random(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("PhaseVector: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXcd psi(n);
  for (int i = 0; i < n; ++i) psi(i) = std::polar(1.0, angle(rng));
  return PhaseVector(std::move(psi));
}

PhaseVector optimal_phases(int n, double global_phase) {
  return PhaseVector::uniform(n, global_phase);
}

namespace {

void check_dimensions(const PhaseVector &psi, const LoSChannel &h,
                      const HermitianMatrix &r_ris,
                      const HermitianMatrix *r_direct) {
  if (h.ris_dim() != psi.size() || h.ris_dim() != r_ris.dim()) {
    std::ostringstream err;
    err << "RIS dimension mismatch: H is " << h.rx_dim() << "x" << h.ris_dim()
        << ", psi has " << psi.size() << " entries, R_h is " << r_ris.dim()
        << "x" << r_ris.dim();
    throw std::invalid_argument(err.str());
  }
  if (r_direct != nullptr && r_direct->dim() != h.rx_dim()) {
    std::ostringstream err;
    err << "RIS dimension mismatch: H is " << h.rx_dim() << "x" << h.ris_dim()
        << " but R_d is " << r_direct->dim() << "x" << r_direct->dim();
    throw std::invalid_argument(err.str());
  }
}

}  // namespace

HermitianMatrix signal_covariance(const PhaseVector &psi, const LoSChannel &h,
                                  const HermitianMatrix &r_direct,
                                  const HermitianMatrix &r_ris,
                                  const PathLoss &pl, double transmit_power) {
  check_dimensions(psi, h, r_ris, &r_direct);
  if (transmit_power < 0.0)
    throw std::invalid_argument("signal_covariance: negative transmit power");
  const Eigen::MatrixXcd reflected =
      h.matrix * psi.diagonal();  // H diag(psi), M x N
  Eigen::MatrixXcd r_s =
      pl.beta * transmit_power * r_direct.matrix() +
      pl.nu * transmit_power * reflected * r_ris.matrix() * reflected.adjoint();
  return HermitianMatrix::from(r_s, /*positive_semidefinite=*/true);
}

double trace_objective(const PhaseVector &psi, const LoSChannel &h,
                       const HermitianMatrix &r_ris) {
  check_dimensions(psi, h, r_ris, nullptr);
  // (H^H H) (.) R_h is Hermitian, so the quadratic form is real.
  const Eigen::MatrixXcd gram = h.matrix.adjoint() * h.matrix;
  const Eigen::MatrixXcd hadamard = gram.cwiseProduct(r_ris.matrix());
  const Complex value =
      psi.coefficients().adjoint() * hadamard * psi.coefficients();
  return value.real();
}

}  // namespace sense
