#include "bayalign/geometry.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "bayalign/errors.hpp"

namespace bayalign {

Registration Registration::inverse() const {
  // x = (y - t) R^T
  Registration inv;
  inv.rotation = rotation.transpose();
  inv.translation = -translation * inv.rotation;
  return inv;
}

bool Registration::is_proper(double tol) const {
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Superposition superpose(const Coords& xm, const Coords& ym) {
  const Eigen::Index k = xm.rows();
  if (k != ym.rows()) throw ContractError("superpose: coordinate blocks differ in length");
  if (k < 3) throw DegenerateError("superpose: at least three matched points are required, got " + std::to_string(k));
  if (!xm.allFinite() || !ym.allFinite()) throw ContractError("superpose: non-finite coordinates");

  const Eigen::RowVector3d xbar = xm.colwise().mean();
  const Eigen::RowVector3d ybar = ym.colwise().mean();
  const Coords xc = xm.rowwise() - xbar;
  const Coords yc = ym.rowwise() - ybar;

  // Maximise tr(R^T H) with H = Xc^T Yc.
  const Eigen::Matrix3d h = xc.transpose() * yc;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  const double scale = std::max(sv(0), 1e-300);
  if (sv(0) <= 0.0 || sv(1) <= 1e-12 * scale) {
    throw DegenerateError("superpose: centred cross-covariance has rank below two");
  }

  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);

  Superposition out;
  out.reg.rotation = u * v.transpose();
  out.reg.translation = ybar - xbar * out.reg.rotation;
  out.dp2 = ((xc * out.reg.rotation) - yc).squaredNorm();
  return out;
}

double procrustes_distance2(const Coords& xm, const Coords& ym) { return superpose(xm, ym).dp2; }

double rmsd(const Coords& xm, const Coords& ym) {
  return std::sqrt(procrustes_distance2(xm, ym) / static_cast<double>(xm.rows()));
}

Coords apply(const Registration& reg, const Coords& x) {
  Coords out = x * reg.rotation;
  out.rowwise() += reg.translation;
  return out;
}

Eigen::Vector3d euler_angles(const Eigen::Matrix3d& rotation) {
  // Row-vector convention: the column-vector rotation is rotation^T.
  const Eigen::Matrix3d r = rotation.transpose();
  const double sy = std::sqrt(r(0, 0) * r(0, 0) + r(1, 0) * r(1, 0));
  if (sy > 1e-9) {
    return {std::atan2(r(2, 1), r(2, 2)), std::atan2(-r(2, 0), sy), std::atan2(r(1, 0), r(0, 0))};
  }
  return {std::atan2(-r(1, 2), r(1, 1)), std::atan2(-r(2, 0), sy), 0.0};
}

}  // namespace bayalign
