#pragma once

#include "msynth/common.hpp"

namespace msynth {

/// Analytic two-bone arm solution. `upper` and `lower` are world rotations
/// mapping the rest bone offsets onto the solved bone directions.
struct TwoBoneSolution {
  bool reachable = false;
  Vector3d elbow = Vector3d::Zero();
  Matrix3d upper = Matrix3d::Identity();
  Matrix3d lower = Matrix3d::Identity();
};

/// Places the wrist of a shoulder->elbow->wrist chain exactly on `target`.
/// `restUpper` / `restLower` are the rest-pose bone offsets (elbow relative to
/// shoulder, wrist relative to elbow); their lengths fix the reach. The elbow
/// bends into the half-space `bendHint` points to. Unreachable targets give
/// `reachable = false` with identity rotations.
TwoBoneSolution twoBoneIk(const Vector3d& shoulder, const Vector3d& target,
                          const Vector3d& restUpper, const Vector3d& restLower,
                          const Vector3d& bendHint);

}  // namespace msynth
