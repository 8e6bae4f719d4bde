#include "msynth/kin/proxy_surface.hpp"

#include <cmath>
#include <numbers>

namespace msynth {

namespace {

// Deterministic orthonormal frame around a bone's rest direction.
void boneFrame(const Vector3d& axis, Vector3d& u, Vector3d& v) {
  const Vector3d seed =
      std::abs(axis.normalized().z()) < 0.9 ? Vector3d::UnitZ() : Vector3d::UnitX();
  u = axis.cross(seed).normalized();
  v = axis.normalized().cross(u);
}

}  // namespace

Matrix3Xd sampleProxySurface(const Skeleton& skel, const FkResult& fk) {
  Matrix3Xd points(3, proxyPointCount(skel));
  Eigen::Index next = 0;
  for (int j = 1; j < skel.jointCount(); ++j) {
    const int p = skel.parents[j];
    const Vector3d offset = skel.offsets.col(j);
    const double radius = skel.capsuleRadii(j);
    Vector3d u, v;
    if (offset.norm() < 1e-12) {
      u = Vector3d::UnitX();
      v = Vector3d::UnitY();
    } else {
      boneFrame(offset, u, v);
    }
    // Ring positions stay strictly inside the bone span so the sample is a
    // function of the bone only, not of neighboring joints.
    for (int r = 0; r < skel.proxyRings; ++r) {
      const double t = static_cast<double>(r + 1) / (skel.proxyRings + 1);
      for (int s = 0; s < skel.proxySegments; ++s) {
        const double angle = 2.0 * std::numbers::pi * s / skel.proxySegments;
        const Vector3d local =
            t * offset + radius * (std::cos(angle) * u + std::sin(angle) * v);
        points.col(next++) =
            fk.positions.col(p) + fk.rotations[static_cast<std::size_t>(p)] * local;
      }
    }
  }
  return points;
}

Matrix3Xd sampleProxySurface(const Skeleton& skel, const PoseFrame& frame) {
  return sampleProxySurface(skel, forwardKinematics(skel, frame));
}

}  // namespace msynth
