#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace msynth {

/// 6D rotation encoding: the first two columns of a 3x3 rotation matrix,
/// stacked column-major (coeffs 0..2 = column 0, coeffs 3..5 = column 1).
/// The layout is part of every serialized format that stores rotations.
template <typename Scalar>
using Rotation6 = Eigen::Matrix<Scalar, 6, 1>;

using Rotation6d = Rotation6<double>;

/// Recovers the full rotation matrix by Gram-Schmidt on the two encoded
/// columns; the third column is their cross product. Any pair of non-zero,
/// non-parallel columns maps to a proper rotation (det = +1).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> sixdToMatrix(const Rotation6<Scalar>& r) {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  const Vec3 c0 = r.template head<3>();
  const Vec3 c1 = r.template tail<3>();

  const Scalar n0 = c0.norm();
  if (!(n0 > Scalar(1e-12))) {
    throw std::invalid_argument("sixdToMatrix: first column is numerically zero");
  }
  const Vec3 b0 = c0 / n0;
  const Vec3 ortho = c1 - b0.dot(c1) * b0;
  const Scalar n1 = ortho.norm();
  if (!(n1 > Scalar(1e-12))) {
    throw std::invalid_argument("sixdToMatrix: encoded columns are parallel");
  }
  const Vec3 b1 = ortho / n1;

  Eigen::Matrix<Scalar, 3, 3> m;
  m.col(0) = b0;
  m.col(1) = b1;
  m.col(2) = b0.cross(b1);
  return m;
}

/// Inverse of sixdToMatrix for proper rotations: keeps the first two columns.
/// Rejects matrices that are not orthonormal with det +1 beyond tolerance.
template <typename Scalar>
Rotation6<Scalar> matrixToSixd(const Eigen::Matrix<Scalar, 3, 3>& m,
                               Scalar tolerance = Scalar(1e-6)) {
  const Eigen::Matrix<Scalar, 3, 3> gram = m.transpose() * m;
  const Scalar orthoErr =
      (gram - Eigen::Matrix<Scalar, 3, 3>::Identity()).cwiseAbs().maxCoeff();
  if (orthoErr > tolerance || std::abs(m.determinant() - Scalar(1)) > tolerance) {
    throw std::invalid_argument("matrixToSixd: input is not a proper rotation");
  }
  Rotation6<Scalar> r;
  r.template head<3>() = m.col(0);
  r.template tail<3>() = m.col(1);
  return r;
}

inline Rotation6d identityRotation6d() {
  Rotation6d r;
  r << 1, 0, 0, 0, 1, 0;
  return r;
}

}  // namespace msynth
