#pragma once

#include "msynth/common.hpp"

namespace msynth {

/// Similarity transform p -> scale * rotation * p + translation.
/// scale is 1 for rigid motion; solveProcrustes may report other values.
struct RigidTransform {
  Matrix3d rotation = Matrix3d::Identity();
  Vector3d translation = Vector3d::Zero();
  double scale = 1.0;

  Vector3d apply(const Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }

  Matrix3Xd applyPoints(const Matrix3Xd& points) const {
    return (scale * (rotation * points)).colwise() + translation;
  }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = rotation.transpose();
    inv.translation = -inv.scale * (inv.rotation * translation);
    return inv;
  }

  /// Orthonormal rotation with det +1 and positive scale, within tolerance.
  bool isValid(double tolerance = 1e-6) const {
    if (!(scale > 0.0)) return false;
    const double orthoErr =
        (rotation.transpose() * rotation - Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return orthoErr <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
  }
};

}  // namespace msynth
