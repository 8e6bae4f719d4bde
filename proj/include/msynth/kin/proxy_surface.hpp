#pragma once

#include "msynth/kin/skeleton.hpp"

namespace msynth {

/// Points sampled per posed skeleton: rings around every bone's capsule.
inline Eigen::Index proxyPointCount(const Skeleton& skel) {
  return static_cast<Eigen::Index>(skel.boneCount()) * skel.proxyRings * skel.proxySegments;
}

/// Deterministic capsule-surface sample rigidly attached to the bones; stands
/// in for a body mesh in per-vertex error and collision checks. Point order
/// is fixed by (bone, ring, segment), so corresponding poses give
/// corresponding columns.
Matrix3Xd sampleProxySurface(const Skeleton& skel, const FkResult& fk);
Matrix3Xd sampleProxySurface(const Skeleton& skel, const PoseFrame& frame);

}  // namespace msynth
