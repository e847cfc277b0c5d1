#pragma once

#include <Eigen/Core>

namespace bayalign {

/// k x 3 coordinate block, one point per row (Angstrom).
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Rigid motion acting on row vectors: x -> x * rotation + translation.
struct Registration {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::RowVector3d translation = Eigen::RowVector3d::Zero();

  static Registration identity() { return {}; }
  Registration inverse() const;
  /// Orthogonality and det = +1, both within `tol`.
  bool is_proper(double tol = 1e-9) const;
};

struct Superposition {
  Registration reg;
  /// Squared partial Procrustes distance, sum of squared residuals after registration.
  double dp2 = 0.0;
};

/// Least-squares proper rotation and translation taking `xm` onto `ym`.
///
/// Rows of the two blocks are paired. Reflections are rejected by flipping the
/// weakest singular direction. Throws DegenerateError for fewer than three
/// points or a centred cross-covariance of rank below two.
Superposition superpose(const Coords& xm, const Coords& ym);

double procrustes_distance2(const Coords& xm, const Coords& ym);
double rmsd(const Coords& xm, const Coords& ym);

Coords apply(const Registration& reg, const Coords& x);

/// ZYX Euler angles (radians) of a rotation matrix, for trace monitoring.
Eigen::Vector3d euler_angles(const Eigen::Matrix3d& rotation);

}  // namespace bayalign
