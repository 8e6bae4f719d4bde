#pragma once

#include "msynth/kin/skeleton.hpp"

#include <vector>

namespace msynth {

/// Motion clip: one PoseFrame per frame at a fixed rate.
struct PoseSequence {
  std::vector<PoseFrame> frames;
  double fps = 30.0;

  Eigen::Index frameCount() const { return static_cast<Eigen::Index>(frames.size()); }
};

/// Scalars per flattened frame: root xyz then 6 per rotated joint.
inline Eigen::Index poseDim(const Skeleton& skel) { return 3 + 6 * skel.rotatedCount(); }

VectorXd rowFromFrame(const Skeleton& skel, const PoseFrame& frame);
PoseFrame frameFromRow(const Skeleton& skel, const VectorXd& row);

/// frames x poseDim matrix; row t = [root xyz, rotated joints in skeleton
/// order, 6 scalars each].
MatrixXd flattenPose(const Skeleton& skel, const PoseSequence& seq);
PoseSequence unflattenPose(const Skeleton& skel, const MatrixXd& flat, double fps = 30.0);

/// Forward kinematics for every frame; element t is 3 x J world positions.
std::vector<Matrix3Xd> jointPositions(const Skeleton& skel, const PoseSequence& seq);

/// Left/right wrist world positions per frame as a frames x 6 matrix
/// [left xyz, right xyz]; these are the pipeline's hand positions.
MatrixXd wristTrack(const Skeleton& skel, const PoseSequence& seq);

}  // namespace msynth
