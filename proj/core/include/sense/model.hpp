// SPDX-License-Identifier: Apache-2.0
//
// Spatial system model: array geometry, steering vectors, the rank-1
// line-of-sight RIS-to-receiver channel, and the covariance builders for
// correlated Rayleigh fading (sinc kernel) and exponentially correlated noise.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sense/errors.hpp"

namespace sense {

using Complex = std::complex<double>;

/// Physical layout and propagation parameters of the sensing link.
///
/// The secondary-user receiver is a uniform linear array of `su_antennas`
/// elements; the RIS is a uniform planar array of `ris_nx` x `ris_ny`
/// elements.  Both use the same inter-element `spacing` (meters).  Angles are
/// radians: `arrival` is the direction of arrival at the receiver array,
/// `azimuth`/`elevation` locate the receiver as seen from the RIS.
struct SystemGeometry {
  int su_antennas = 8;
  int ris_nx = 8;
  int ris_ny = 4;
  double wavelength = 0.1;
  double spacing = 0.05;
  double arrival = 0.5235987755982988;    // pi/6
  double azimuth = 0.3;
  double elevation = 0.2617993877991494;  // pi/12
  double direct_distance = 30.0;          // transmitter -> receiver (m)
  double distance_ratio = 1.0 / 3.0;      // direct / (via-RIS) distance
  double pathloss_exponent = 3.0;

  int ris_elements() const { return ris_nx * ris_ny; }

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

/// Large-scale path-loss coefficients of the two propagation routes.
/// `beta` is the direct-link gain d^-xi, `nu` the via-RIS gain, and
/// `mu = nu / beta = ratio^xi` their ratio.
struct PathLoss {
  double beta = 0.0;
  double nu = 0.0;
  double mu = 0.0;
};

/// Hermitian matrix wrapper that validates its invariant on construction.
///
/// Entries must satisfy A(i,j) = conj(A(j,i)) within 1e-12 absolute; the
/// stored matrix is the exactly Hermitian average (A + A^H)/2.  A matrix may
/// additionally be flagged positive semidefinite, in which case eigenvalues
/// are required to be >= -1e-10 * lambda_max.
class HermitianMatrix {
public:
  HermitianMatrix() = default;

  /// Validates and wraps `a`; throws std::invalid_argument on violation.
  static HermitianMatrix from(const Eigen::MatrixXcd &a,
                              bool positive_semidefinite = false);

  const Eigen::MatrixXcd &matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  bool flagged_psd() const { return psd_; }
  double trace() const { return mat_.trace().real(); }

  /// Copy with eigenvalues floored at 1e-12 * lambda_max — a strictly
  /// positive-definite stand-in for numerically semidefinite kernels.
  HermitianMatrix psd_regularized() const;

private:
  Eigen::MatrixXcd mat_;
  bool psd_ = false;
};

/// Eigenvalue-range summary used to report conditioning of model covariances.
struct SpectralReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool near_singular = false;  // min < 1e-12 * max
};

SpectralReport condition_report(const HermitianMatrix &a);

/// Rank-1 line-of-sight channel between the RIS and the receiver array.
struct LoSChannel {
  Eigen::MatrixXcd matrix;  // su_antennas x ris_elements

  Eigen::Index rx_dim() const { return matrix.rows(); }
  Eigen::Index ris_dim() const { return matrix.cols(); }
};

/// Unit-norm array response a_q(x) = (1/sqrt(q)) [1, e^{jx}, ..., e^{j(q-1)x}].
/// `x` is the inter-element phase increment in radians.
Eigen::VectorXcd steering_vector(double x, int q);

/// Element coordinates of a uniform linear array along the x-axis.
std::vector<Eigen::Vector3d> ula_positions(int count, double spacing);

/// Element coordinates of an nx-by-ny uniform planar array in the xy-plane,
/// ordered x-major: element (ix, iy) sits at index ix*ny + iy.
std::vector<Eigen::Vector3d> upa_positions(int nx, int ny, double spacing);

/// Spatial correlation matrix R(i,j) = sinc(2 |p_i - p_j| / wavelength) with
/// the normalized sinc sin(pi u)/(pi u) — the isotropic scattering kernel.
/// The result carries the PSD flag.
HermitianMatrix sinc_covariance(const std::vector<Eigen::Vector3d> &positions,
                                double wavelength);

/// Exponential (Kac-Murdock-Szego) noise covariance sigma2 * rho^|i-j|.
/// Requires |rho| < 1 and sigma2 > 0.
HermitianMatrix noise_covariance(int m, double rho, double sigma2);

/// Path-loss coefficients for a direct link of length `distance` and an
/// indirect link of length `distance / ratio`, both with exponent `exponent`.
PathLoss path_losses(double distance, double ratio, double exponent);

/// Line-of-sight RIS-to-receiver channel
///   H = sqrt(M N) a_M(k d cos(arrival)) a_N(azimuth, elevation)^H,
/// where a_N is the planar-array response kron(a_nx(k d cos(azimuth)),
/// a_ny(k d sin(azimuth) cos(elevation))) and k = 2 pi / wavelength.  Entries
/// are unit modulus, so ||H||_F = sqrt(M N) and the single nonzero singular
/// value is sqrt(M N).
LoSChannel los_channel(const SystemGeometry &geometry);

}  // namespace sense
