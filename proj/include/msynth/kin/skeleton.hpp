#pragma once

#include "msynth/common.hpp"
#include "msynth/math/rotation.hpp"

#include <string>
#include <vector>

namespace msynth {

using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Joint tree in topological order (parent index < child index, root first).
/// Only the joints listed in `rotatedJoints` carry local rotations in a pose;
/// every other joint inherits its parent's global rotation unchanged.
struct Skeleton {
  std::vector<std::string> jointNames;
  std::vector<int> parents;        // root = -1
  Matrix3Xd offsets;               // rest-pose offset from parent, meters
  std::vector<int> rotatedJoints;  // strictly ascending
  int leftWrist = -1;
  int rightWrist = -1;
  std::vector<int> footJoints;
  VectorXd capsuleRadii;           // per joint: radius of the parent->joint bone
  int proxyRings = 3;              // sample rings along each bone
  int proxySegments = 6;           // points per ring

  int jointCount() const { return static_cast<int>(parents.size()); }
  int rotatedCount() const { return static_cast<int>(rotatedJoints.size()); }
  int boneCount() const { return jointCount() - 1; }

  void validate() const;  // throws ConfigError
};

/// One posed frame: world root position plus a 6D rotation per rotated joint
/// (columns follow skeleton.rotatedJoints order).
struct PoseFrame {
  Vector3d root = Vector3d::Zero();
  Matrix6Xd rotations;

  static PoseFrame rest(const Skeleton& skel);
};

struct FkResult {
  Matrix3Xd positions;              // 3 x J world joint positions
  std::vector<Matrix3d> rotations;  // J world joint rotations
};

/// position[child] = position[parent] + R_world(parent) * offset[child];
/// R_world(j) = R_world(parent) * R_local(j).
FkResult forwardKinematics(const Skeleton& skel, const PoseFrame& frame);

/// Default full-body skeleton: 24 joints, the first 22 rotated, hand tips as
/// unrotated leaves. Z is up, X is forward.
Skeleton humanoid24();

/// Desk-scale 9-joint upper body: root/spine/head plus two 3-joint arms;
/// only shoulders and elbows rotate, so poses are 27 scalars per frame.
Skeleton stickFigure9();

}  // namespace msynth
