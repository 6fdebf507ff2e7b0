// SPDX-License-Identifier: Apache-2.0

#include "sense/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sense {

namespace {

// Normalized sinc: sin(pi u) / (pi u), continuous at 0.
double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double pu = std::numbers::pi * u;
  return std::sin(pu) / pu;
}

}  // namespace

void SystemGeometry::validate() const {
  std::ostringstream err;
  if (su_antennas < 1) err << "su_antennas must be >= 1; ";
  if (ris_nx < 1 || ris_ny < 1) err << "ris_nx and ris_ny must be >= 1; ";
  if (!(wavelength > 0.0)) err << "wavelength must be positive; ";
  if (!(spacing > 0.0)) err << "spacing must be positive; ";
  if (!(direct_distance > 0.0)) err << "direct_distance must be positive; ";
  if (!(distance_ratio > 0.0) || distance_ratio > 1.0)
    err << "distance_ratio must lie in (0, 1]; ";
  if (!(pathloss_exponent > 0.0)) err << "pathloss_exponent must be positive; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("SystemGeometry: " + msg);
}

HermitianMatrix HermitianMatrix::from(const Eigen::MatrixXcd &a,
                                      bool positive_semidefinite) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("HermitianMatrix: matrix is not square");
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    std::ostringstream err;
    err << "HermitianMatrix: asymmetry " << asym << " exceeds 1e-12";
    throw std::invalid_argument(err.str());
  }
  HermitianMatrix out;
  out.mat_ = 0.5 * (a + a.adjoint().eval());
  out.psd_ = positive_semidefinite;
  if (positive_semidefinite && a.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.mat_,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -1e-10 * std::max(hi, 0.0)) {
      std::ostringstream err;
      err << "HermitianMatrix: PSD flag requested but min eigenvalue " << lo
          << " < -1e-10 * " << hi;
      throw std::invalid_argument(err.str());
    }
  }
  return out;
}

HermitianMatrix HermitianMatrix::psd_regularized() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_);
  Eigen::VectorXd vals = es.eigenvalues();
  const double floor = 1e-12 * vals.maxCoeff();
  vals = vals.cwiseMax(floor);
  const Eigen::MatrixXcd fixed = es.eigenvectors() * vals.asDiagonal() *
                                 es.eigenvectors().adjoint();
  return HermitianMatrix::from(fixed, true);
}

SpectralReport condition_report(const HermitianMatrix &a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix(),
                                                     Eigen::EigenvaluesOnly);
  SpectralReport report;
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.max_eigenvalue = es.eigenvalues().maxCoeff();
  report.near_singular =
      report.min_eigenvalue < 1e-12 * report.max_eigenvalue;
  return report;
}

Eigen::VectorXcd steering_vector(double x, int q) {
  if (q < 1) throw std::invalid_argument("steering_vector: q must be >= 1");
  Eigen::VectorXcd a(q);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  for (int k = 0; k < q; ++k)
    a(k) = std::polar(scale, x * static_cast<double>(k));
  return a;
}

std::vector<Eigen::Vector3d> ula_positions(int count, double spacing) {
  if (count < 1 || !(spacing > 0.0))
    throw std::invalid_argument("ula_positions: need count >= 1, spacing > 0");
  std::vector<Eigen::Vector3d> pos;
  pos.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    pos.emplace_back(i * spacing, 0.0, 0.0);
  return pos;
}

std::vector<Eigen::Vector3d> upa_positions(int nx, int ny, double spacing) {
  if (nx < 1 || ny < 1 || !(spacing > 0.0))
    throw std::invalid_argument("upa_positions: need nx, ny >= 1, spacing > 0");
  std::vector<Eigen::Vector3d> pos;
  pos.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      pos.emplace_back(ix * spacing, iy * spacing, 0.0);
  return pos;
}

HermitianMatrix sinc_covariance(const std::vector<Eigen::Vector3d> &positions,
                                double wavelength) {
  if (positions.empty())
    throw std::invalid_argument("sinc_covariance: empty position list");
  if (!(wavelength > 0.0))
    throw std::invalid_argument("sinc_covariance: wavelength must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXcd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist =
          (positions[static_cast<std::size_t>(i)] -
           positions[static_cast<std::size_t>(j)])
              .norm();
      const double value = sinc(2.0 * dist / wavelength);
      r(i, j) = value;
      r(j, i) = value;
    }
  }
  return HermitianMatrix::from(r, /*positive_semidefinite=*/true);
}

HermitianMatrix noise_covariance(int m, double rho, double sigma2) {
  if (m < 1) throw std::invalid_argument("noise_covariance: m must be >= 1");
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument("noise_covariance: need |rho| < 1");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("noise_covariance: sigma2 must be positive");
  Eigen::MatrixXcd r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      r(i, j) = sigma2 * std::pow(rho, std::abs(i - j));
  return HermitianMatrix::from(r, /*positive_semidefinite=*/true);
}

PathLoss path_losses(double distance, double ratio, double exponent) {
  if (!(distance > 0.0) || !(ratio > 0.0) || ratio > 1.0 || !(exponent > 0.0))
    throw std::invalid_argument(
        "path_losses: need distance > 0, ratio in (0,1], exponent > 0");
  PathLoss pl;
  pl.beta = std::pow(distance, -exponent);
  pl.nu = std::pow(distance / ratio, -exponent);
  pl.mu = std::pow(ratio, exponent);
  return pl;
}

LoSChannel los_channel(const SystemGeometry &g) {
  g.validate();
  const double k_spacing = 2.0 * std::numbers::pi * g.spacing / g.wavelength;
  const Eigen::VectorXcd a_rx =
      steering_vector(k_spacing * std::cos(g.arrival), g.su_antennas);
  const Eigen::VectorXcd a_x =
      steering_vector(k_spacing * std::cos(g.azimuth), g.ris_nx);
  const Eigen::VectorXcd a_y = steering_vector(
      k_spacing * std::sin(g.azimuth) * std::cos(g.elevation), g.ris_ny);
  // Planar-array response, x-major to match upa_positions ordering.
  Eigen::VectorXcd a_ris(g.ris_elements());
  for (int ix = 0; ix < g.ris_nx; ++ix)
    for (int iy = 0; iy < g.ris_ny; ++iy)
      a_ris(ix * g.ris_ny + iy) = a_x(ix) * a_y(iy);
  const double gain =
      std::sqrt(static_cast<double>(g.su_antennas) * g.ris_elements());
  LoSChannel h;
  h.matrix = gain * a_rx * a_ris.adjoint();
  return h;
}

}  // namespace sense
