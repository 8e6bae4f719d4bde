#pragma once

#include "msynth/common.hpp"
#include "msynth/math/rigid_transform.hpp"

#include <vector>

namespace msynth {

/// Closed-form least-squares similarity alignment: finds scale, rotation and
/// translation minimizing sum_i |s R source_i + t - target_i|^2 via SVD of the
/// cross-covariance, with the determinant-sign correction so the result is
/// always a proper rotation. Requires >= 3 non-collinear point pairs.
RigidTransform solveProcrustes(const std::vector<Vector3d>& source,
                               const std::vector<Vector3d>& target);

/// Root-mean-square distance between transformed source and target.
double alignmentRmse(const std::vector<Vector3d>& source,
                     const std::vector<Vector3d>& target,
                     const RigidTransform& transform);

}  // namespace msynth
